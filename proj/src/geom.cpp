#include "geograsp/geom.hpp"

#include <algorithm>
#include <utility>

namespace geograsp {

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw InvalidArgumentError("cannot normalize a zero-length vector");
  return v / n;
}

Mat4 Mat4::translation(const Vec3& t) {
  Mat4 m = identity();
  m(0, 3) = t.x;
  m(1, 3) = t.y;
  m(2, 3) = t.z;
  return m;
}

Mat4 Mat4::rigid(const Vec3& col_x, const Vec3& col_y, const Vec3& col_z, const Vec3& t) {
  return Mat4({col_x.x, col_y.x, col_z.x, t.x,  //
               col_x.y, col_y.y, col_z.y, t.y,  //
               col_x.z, col_y.z, col_z.z, t.z,  //
               0, 0, 0, 1});
}

Mat4 Mat4::operator*(const Mat4& o) const {
  Mat4 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

Vec4 Mat4::operator*(const Vec4& v) const {
  const auto row = [&](int i) {
    return (*this)(i, 0) * v.x + (*this)(i, 1) * v.y + (*this)(i, 2) * v.z + (*this)(i, 3) * v.w;
  };
  return {row(0), row(1), row(2), row(3)};
}

Vec3 Mat4::transform_point(const Vec3& p) const {
  const Vec4 r = (*this) * Vec4{p.x, p.y, p.z, 1.0};
  return {r.x, r.y, r.z};
}

Vec3 Mat4::transform_direction(const Vec3& d) const {
  const Vec4 r = (*this) * Vec4{d.x, d.y, d.z, 0.0};
  return {r.x, r.y, r.z};
}

Mat4 Mat4::transposed() const {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Mat4 Mat4::inverse() const {
  std::array<std::array<double, 8>, 4> a{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = (*this)(i, j);
    a[i][4 + i] = 1.0;
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14) throw DegenerateProjectionError("matrix is not invertible");
    std::swap(a[col], a[pivot]);
    const double inv = 1.0 / a[col][col];
    for (double& v : a[col]) v *= inv;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 8; ++j) a[r][j] -= f * a[col][j];
    }
  }
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = a[i][4 + j];
  return r;
}

Mat4 Mat4::rigid_inverse() const {
  Mat4 r = identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  const Vec3 t{(*this)(0, 3), (*this)(1, 3), (*this)(2, 3)};
  const Vec3 rt = r.transform_direction(t);
  r(0, 3) = -rt.x;
  r(1, 3) = -rt.y;
  r(2, 3) = -rt.z;
  return r;
}

bool Mat4::is_rigid(double tol) const {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (*this)(k, i) * (*this)(k, j);
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return (*this)(3, 0) == 0.0 && (*this)(3, 1) == 0.0 && (*this)(3, 2) == 0.0 &&
         (*this)(3, 3) == 1.0;
}

Mat4 perspective(double fovy, double aspect, double z_near, double z_far) {
  if (!(z_near > 0.0) || !(z_far > z_near))
    throw InvalidArgumentError("perspective requires 0 < z_near < z_far");
  if (!(fovy > 0.0 && fovy < kPi) || !(aspect > 0.0))
    throw InvalidArgumentError("perspective requires 0 < fovy < pi and aspect > 0");
  const double f = 1.0 / std::tan(fovy / 2.0);
  Mat4 k;
  k(0, 0) = f / aspect;
  k(1, 1) = f;
  k(2, 2) = (z_far + z_near) / (z_near - z_far);
  k(2, 3) = 2.0 * z_far * z_near / (z_near - z_far);
  k(3, 2) = -1.0;
  return k;
}

Mat4 look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = target - eye;
  const double dist = norm(forward);
  if (!(dist > 1e-12)) throw InvalidArgumentError("look_at: eye and target coincide");
  const Vec3 f = forward / dist;
  const Vec3 side = cross(f, up);
  const double side_norm = norm(side);
  if (!(side_norm > 1e-9 * std::max(1.0, norm(up))))
    throw InvalidArgumentError("look_at: up vector is parallel to the view direction");
  const Vec3 s = side / side_norm;
  const Vec3 u = cross(s, f);
  // Camera frame columns in world: x = s, y = u, z = -f.
  return Mat4::rigid(s, u, -f, eye).rigid_inverse();
}

CameraModel::CameraModel(const Mat4& projection, const Mat4& view, double z_near, double z_far,
                         int width, int height)
    : projection_(projection),
      view_(view),
      view_projection_(projection * view),
      z_near_(z_near),
      z_far_(z_far),
      width_(width),
      height_(height) {
  if (!(z_near > 0.0) || !(z_far > z_near))
    throw InvalidArgumentError("camera requires 0 < z_near < z_far");
  if (width < 1 || height < 1) throw InvalidArgumentError("camera resolution must be at least 1x1");
  inverse_view_projection_ = view_projection_.inverse();
}

CameraModel CameraModel::look_at_perspective(const Vec3& eye, const Vec3& target, const Vec3& up,
                                             double fovy, double z_near, double z_far, int width,
                                             int height) {
  const double aspect = static_cast<double>(width) / static_cast<double>(height);
  return CameraModel(perspective(fovy, aspect, z_near, z_far), look_at(eye, target, up), z_near,
                     z_far, width, height);
}

Vec3 CameraModel::eye_position() const {
  const Mat4 inv = view_.inverse();
  return {inv(0, 3), inv(1, 3), inv(2, 3)};
}

CameraModel CameraModel::with_resolution(int width, int height) const {
  return CameraModel(projection_, view_, z_near_, z_far_, width, height);
}

Vec3 world_to_ndc(const Vec3& p, const CameraModel& cam) {
  const Vec4 c = cam.view_projection() * Vec4{p.x, p.y, p.z, 1.0};
  if (!(c.w > kDegenerateW))
    throw DegenerateProjectionError("point lies at or behind the camera eye plane");
  return {c.x / c.w, c.y / c.w, c.z / c.w};
}

Vec3 ndc_to_world(const Vec3& ndc, const CameraModel& cam) {
  const Vec4 h = cam.inverse_view_projection() * Vec4{ndc.x, ndc.y, ndc.z, 1.0};
  if (std::abs(h.w) < 1e-300) throw DegenerateProjectionError("NDC point maps to infinity");
  return {h.x / h.w, h.y / h.w, h.z / h.w};
}

double ndc_depth_to_eye_depth(double z_ndc, double z_near, double z_far) {
  if (!(z_ndc >= -1.0 && z_ndc <= 1.0)) throw RangeError("NDC depth outside [-1, 1]");
  const double alpha = (z_near - z_far) / (2.0 * z_near * z_far);
  const double beta = (z_near + z_far) / (2.0 * z_near * z_far);
  return -1.0 / (alpha * z_ndc + beta);
}

double eye_depth_to_ndc(double z_eye, double z_near, double z_far) {
  const double alpha = (z_near - z_far) / (2.0 * z_near * z_far);
  const double beta = (z_near + z_far) / (2.0 * z_near * z_far);
  return (-1.0 / z_eye - beta) / alpha;
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = geograsp::normalized(axis);
  const double s = std::sin(angle / 2.0);
  return {a.x * s, a.y * s, a.z * s, std::cos(angle / 2.0)};
}

Quat Quat::from_euler_xyz_deg(const Vec3& deg) {
  const Quat qx = from_axis_angle({1, 0, 0}, deg_to_rad(deg.x));
  const Quat qy = from_axis_angle({0, 1, 0}, deg_to_rad(deg.y));
  const Quat qz = from_axis_angle({0, 0, 1}, deg_to_rad(deg.z));
  return (qx * qy * qz).normalized();
}

Quat Quat::from_matrix(const Mat4& m) {
  const double trace = m(0, 0) + m(1, 1) + m(2, 2);
  Quat q;
  if (trace > 0.0) {
    const double s = 0.5 / std::sqrt(trace + 1.0);
    q.w = 0.25 / s;
    q.x = (m(2, 1) - m(1, 2)) * s;
    q.y = (m(0, 2) - m(2, 0)) * s;
    q.z = (m(1, 0) - m(0, 1)) * s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2));
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1));
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return q.normalized();
}

Quat Quat::operator*(const Quat& o) const {
  return {w * o.x + x * o.w + y * o.z - z * o.y,  //
          w * o.y - x * o.z + y * o.w + z * o.x,  //
          w * o.z + x * o.y - y * o.x + z * o.w,  //
          w * o.w - x * o.x - y * o.y - z * o.z};
}

Quat Quat::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw InvalidArgumentError("cannot normalize a zero quaternion");
  return {x / n, y / n, z / n, w / n};
}

Quat Quat::canonical() const {
  if (w < 0.0) return {-x, -y, -z, -w};
  return *this;
}

double rotation_angle_deg(const Quat& a, const Quat& b) {
  // relative rotation conj(a) * b; atan2 stays accurate near the identity
  const Quat r = Quat{-a.x, -a.y, -a.z, a.w} * b;
  const double v = std::sqrt(r.x * r.x + r.y * r.y + r.z * r.z);
  return rad_to_deg(2.0 * std::atan2(v, std::abs(r.w)));
}

Vec3 Quat::rotate(const Vec3& v) const {
  const Vec3 u{x, y, z};
  const Vec3 t = 2.0 * cross(u, v);
  return v + w * t + cross(u, t);
}

Mat4 Quat::to_matrix() const {
  const double xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z;
  const double wx = w * x, wy = w * y, wz = w * z;
  return Mat4({1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy), 0,  //
               2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx), 0,  //
               2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy), 0,  //
               0, 0, 0, 1});
}

Vec3 Quat::to_euler_xyz_deg() const {
  const Mat4 r = to_matrix();
  const double sb = std::clamp(r(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  double a = 0.0;
  double c = 0.0;
  if (std::abs(sb) < 1.0 - 1e-12) {
    a = std::atan2(-r(1, 2), r(2, 2));
    c = std::atan2(-r(0, 1), r(0, 0));
  } else {
    // Gimbal lock: fold the x/z ambiguity into x.
    a = std::atan2(r(2, 1), r(1, 1));
  }
  return {rad_to_deg(a), rad_to_deg(b), rad_to_deg(c)};
}

}  // namespace geograsp
