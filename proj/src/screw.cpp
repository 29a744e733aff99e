#include "flexplore/screw.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexplore {

namespace {

constexpr double kUnitTol = 1e-6;
constexpr double kForceDominanceTol = 1e-6;

bool near_unit(const Quat& q, double tol) {
    return std::abs(q.norm() - 1.0) <= tol;
}

}  // namespace

Mat6 delta_matrix() {
    Mat6 d = Mat6::Zero();
    d.topRightCorner<3, 3>() = Mat3::Identity();
    d.bottomLeftCorner<3, 3>() = Mat3::Identity();
    return d;
}

void Pose::renormalize() {
    q.normalize();
}

Quat quat_exp(const Vec3& rotvec) {
    const double angle = rotvec.norm();
    if (angle < 1e-12) {
        return Quat::Identity();
    }
    const Vec3 axis = rotvec / angle;
    const double half = 0.5 * angle;
    const Vec3 v = axis * std::sin(half);
    return Quat(std::cos(half), v.x(), v.y(), v.z());
}

Vec3 quat_log(const Quat& q_in) {
    Quat q = q_in;
    if (q.w() < 0.0) {
        q.coeffs() *= -1.0;
    }
    const Vec3 v(q.x(), q.y(), q.z());
    const double vn = v.norm();
    if (vn < 1e-15) {
        return Vec3::Zero();
    }
    const double angle = 2.0 * std::atan2(vn, q.w());
    return (angle / vn) * v;
}

Pose Pose::perturbed(const Vec6& delta) const {
    Pose out;
    out.r = r + delta.head<3>();
    out.q = quat_exp(delta.tail<3>()) * q;
    out.q.normalize();
    return out;
}

Vec6 Pose::displacement_to(const Pose& other) const {
    Vec6 d;
    d.head<3>() = other.r - r;
    d.tail<3>() = quat_log(other.q * q.inverse());
    return d;
}

Vec6 Twist::vec() const {
    Vec6 x;
    x << v, w;
    return x;
}

Twist Twist::from_vec(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
}

Vec6 Wrench::vec() const {
    Vec6 x;
    x << f, m;
    return x;
}

Wrench Wrench::from_vec(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
}

Vec6 canonicalize_screw(const Vec6& e) {
    const double na = e.head<3>().norm();
    const double nb = e.tail<3>().norm();
    const int offset = (na >= nb) ? 0 : 3;
    const double tol = 1e-12 * e.norm();
    for (int i = 0; i < 3; ++i) {
        const double c = e(offset + i);
        if (std::abs(c) > tol) {
            return (c < 0.0) ? Vec6(-e) : e;
        }
    }
    return e;
}

ScrewVector::ScrewVector(const Vec6& e) {
    if (!e.allFinite() || e.norm() < 1e-300) {
        throw std::invalid_argument("ScrewVector: zero or non-finite screw");
    }
    e_ = canonicalize_screw(e);
}

Quat quat_error(const Quat& q, const Quat& q_g) {
    if (!near_unit(q, kUnitTol) || !near_unit(q_g, kUnitTol)) {
        throw std::invalid_argument("quat_error: input quaternion off unit norm");
    }
    Quat dq = q.conjugate() * q_g;
    dq.normalize();
    if (dq.w() < 0.0) {
        dq.coeffs() *= -1.0;
    }
    return dq;
}

Vec7 pose_error(const Pose& z, const Pose& z_g) {
    const Quat dq = quat_error(z.q, z_g.q);
    Vec7 out;
    out.head<3>() = z_g.r - z.r;
    out(3) = dq.w();
    out(4) = dq.x();
    out(5) = dq.y();
    out(6) = dq.z();
    return out;
}

double raw_pitch(const ScrewVector& e) {
    const Vec6 u = e.vec() / e.norm();
    return std::abs(u.head<3>().dot(u.tail<3>()));
}

double wrench_pitch(const ScrewVector& e) {
    const Vec3 f = e.a();
    const Vec3 m = e.b();
    if (f.norm() <= kForceDominanceTol * e.norm()) {
        return std::numeric_limits<double>::infinity();
    }
    return f.dot(m) / f.squaredNorm();
}

bool pitch_is_infinite(double h) {
    return std::isinf(h);
}

AxisLine screw_axis_line(const ScrewVector& e) {
    const Vec3 a = e.a();
    const Vec3 b = e.b();
    const bool a_dominant = a.norm() >= b.norm();
    const Vec3 dom = a_dominant ? a : b;
    const Vec3 other = a_dominant ? b : a;
    if (dom.norm() < 1e-12 * e.norm()) {
        throw std::invalid_argument("screw_axis_line: degenerate screw");
    }
    AxisLine line;
    line.direction = dom.normalized();
    line.point = dom.cross(other) / dom.squaredNorm();
    return line;
}

}  // namespace flexplore
