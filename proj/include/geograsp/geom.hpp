#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace geograsp {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateProjectionError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}
Vec3 normalized(const Vec3& v);

struct Vec4 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 0.0;
};

// Homogeneous 4x4 transform. Storage is row-major and points are column
// vectors, so `m * p` applies m to p and `a * b` applies b first.
class Mat4 {
 public:
  constexpr Mat4() : m_{} {}
  constexpr explicit Mat4(const std::array<double, 16>& row_major) : m_(row_major) {}

  static constexpr Mat4 identity() {
    return Mat4({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  }
  static Mat4 translation(const Vec3& t);
  // Rigid transform from a rotation given by its columns and a translation.
  static Mat4 rigid(const Vec3& col_x, const Vec3& col_y, const Vec3& col_z, const Vec3& t);

  constexpr double operator()(int row, int col) const { return m_[row * 4 + col]; }
  constexpr double& operator()(int row, int col) { return m_[row * 4 + col]; }
  constexpr const std::array<double, 16>& data() const { return m_; }

  Mat4 operator*(const Mat4& o) const;
  Vec4 operator*(const Vec4& v) const;

  // Applies the affine part (assumes bottom row 0,0,0,1).
  Vec3 transform_point(const Vec3& p) const;
  Vec3 transform_direction(const Vec3& d) const;

  Mat4 transposed() const;
  // General inverse by Gauss-Jordan elimination with partial pivoting.
  // Throws DegenerateProjectionError when the matrix is singular.
  Mat4 inverse() const;
  // Inverse of a rigid transform: [R^T | -R^T t].
  Mat4 rigid_inverse() const;

  bool is_rigid(double tol = 1e-9) const;

 private:
  std::array<double, 16> m_;
};

// OpenGL-style perspective projection K. fovy in radians.
Mat4 perspective(double fovy, double aspect, double z_near, double z_far);

// View matrix (world -> eye) looking from `eye` toward `target`; the target
// lands on the -z axis. Throws InvalidArgumentError when degenerate.
Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

// Pinhole camera following the OpenGL convention. Immutable; the composed
// view-projection and its inverse are cached at construction.
class CameraModel {
 public:
  CameraModel(const Mat4& projection, const Mat4& view, double z_near, double z_far,
              int width, int height);

  // Convenience constructor: perspective(fovy) * look_at(eye, target, up).
  static CameraModel look_at_perspective(const Vec3& eye, const Vec3& target, const Vec3& up,
                                         double fovy, double z_near, double z_far, int width,
                                         int height);

  const Mat4& projection() const { return projection_; }
  const Mat4& view() const { return view_; }
  const Mat4& view_projection() const { return view_projection_; }
  const Mat4& inverse_view_projection() const { return inverse_view_projection_; }
  double z_near() const { return z_near_; }
  double z_far() const { return z_far_; }
  int width() const { return width_; }
  int height() const { return height_; }
  Vec3 eye_position() const;

  // Same camera rendered at another resolution.
  CameraModel with_resolution(int width, int height) const;

 private:
  Mat4 projection_;
  Mat4 view_;
  Mat4 view_projection_;
  Mat4 inverse_view_projection_;
  double z_near_;
  double z_far_;
  int width_;
  int height_;
};

inline constexpr double kDegenerateW = 1e-8;

// p^n ~ P p^s followed by the perspective divide.
Vec3 world_to_ndc(const Vec3& p, const CameraModel& cam);
// Inverse mapping of an NDC point back to the world frame.
Vec3 ndc_to_world(const Vec3& ndc, const CameraModel& cam);

// z^e = -1 / (alpha * z_n + beta). Result is signed (negative in front of the camera).
double ndc_depth_to_eye_depth(double z_ndc, double z_near, double z_far);
double eye_depth_to_ndc(double z_eye, double z_near, double z_far);

// Pixel-center NDC coordinate of index i along an axis with n samples.
constexpr double pixel_center_ndc(int i, int n) { return (2.0 * i + 1.0) / n - 1.0; }

// Unit quaternion (x, y, z, w).
struct Quat {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  static Quat from_axis_angle(const Vec3& axis, double angle);
  // Intrinsic X-Y-Z rotation (R = Rx * Ry * Rz), angles in degrees.
  static Quat from_euler_xyz_deg(const Vec3& deg);
  static Quat from_matrix(const Mat4& m);

  Quat operator*(const Quat& o) const;
  double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
  Quat normalized() const;
  // Sign-canonical form with w >= 0.
  Quat canonical() const;
  Vec3 rotate(const Vec3& v) const;
  Mat4 to_matrix() const;
  Vec3 to_euler_xyz_deg() const;
  bool operator==(const Quat&) const = default;
};

inline constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Angle of the relative rotation between two unit quaternions, degrees in [0, 180].
double rotation_angle_deg(const Quat& a, const Quat& b);

}  // namespace geograsp
