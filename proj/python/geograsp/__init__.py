"""Voxel projection, shape fitting, grasp simulation and grasp planning."""

from ._geograsp import (
    Camera,
    Error,
    FormatError,
    GraspPose,
    GridSpec,
    GripperSpec,
    InvalidArgumentError,
    IoError,
    Mlp,
    OccupancyGrid,
    Scene,
    augment_grasps,
    eye_depth_to_ndc,
    find_seed_grasp,
    fit_shape,
    generate_scene,
    grasp_oracle,
    iou,
    load_scene,
    ndc_depth_to_eye_depth,
    plan_grasp,
    project,
    project_soft_backward,
    rasterize,
    train_mlp,
)

__version__ = "0.1.0"
