#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace flexplore {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

/// Block-swap operator exchanging the two 3-subvectors of a screw.
/// Involutory and symmetric.
Mat6 delta_matrix();

/// Rigid-body pose of the gripper: world position plus orientation
/// quaternion (Hamilton convention, scalar-first in all interfaces).
struct Pose {
    Vec3 r{Vec3::Zero()};
    Quat q{Quat::Identity()};

    static Pose identity() { return {}; }

    /// Unit-norm within tolerance; renormalizes in place.
    void renormalize();

    /// Apply a small 6-DoF displacement [dr; dphi]: translation in world
    /// axes, rotation as a world-frame axis-angle about the gripper origin.
    Pose perturbed(const Vec6& delta) const;

    /// Inverse of perturbed(): the 6-vector [dr; dphi] carrying this pose
    /// onto `other`.
    Vec6 displacement_to(const Pose& other) const;
};

struct Twist {
    Vec3 v{Vec3::Zero()};  // linear [m/s]
    Vec3 w{Vec3::Zero()};  // angular [rad/s]

    Vec6 vec() const;
    static Twist from_vec(const Vec6& x);
    double norm() const { return vec().norm(); }
};

struct Wrench {
    Vec3 f{Vec3::Zero()};  // force [N]
    Vec3 m{Vec3::Zero()};  // moment about the gripper origin [N·m]

    Vec6 vec() const;
    static Wrench from_vec(const Vec6& x);
    Wrench operator+(const Wrench& o) const { return {f + o.f, m + o.m}; }
    Wrench operator-(const Wrench& o) const { return {f - o.f, m - o.m}; }
    Wrench operator*(double s) const { return {f * s, m * s}; }
};

/// Spring-wrench axis [f; m]. Stored sign-canonicalized: the first
/// nonzero component of the dominant 3-subvector is positive.
class ScrewVector {
  public:
    /// Throws std::invalid_argument on a (near-)zero vector.
    explicit ScrewVector(const Vec6& e);

    const Vec6& vec() const { return e_; }
    Vec3 a() const { return e_.head<3>(); }  // leading (force) part
    Vec3 b() const { return e_.tail<3>(); }  // trailing (moment) part
    double norm() const { return e_.norm(); }
    ScrewVector normalized() const { return ScrewVector(e_ / e_.norm()); }

  private:
    Vec6 e_;
};

/// Sign-canonicalize a raw 6-vector without constructing a ScrewVector.
Vec6 canonicalize_screw(const Vec6& e);

/// Relative orientation error, Hamilton product q^{-1} * q_g,
/// hemisphere-corrected so the scalar part is nonnegative.
/// Throws std::invalid_argument if either input is off unit norm by
/// more than 1e-6.
Quat quat_error(const Quat& q, const Quat& q_g);

/// 7-vector pose error: [r_g - r; quat_error(q, q_g)].
Vec7 pose_error(const Pose& z, const Pose& z_g);

/// Pitch of the unit-normalized screw, |1/2 e^T Delta e| = |a . b|.
double raw_pitch(const ScrewVector& e);

/// Pitch of an eigenwrench [f; m]: (f.m)/(f.f) when the force part
/// carries the axis, the infinite sentinel for couple-dominant screws.
double wrench_pitch(const ScrewVector& e);
bool pitch_is_infinite(double h);

struct AxisLine {
    Vec3 direction;  // unit
    Vec3 point;      // closest point to the origin
};

/// Axis of a screw: direction from the dominant subvector, point from
/// the perpendicular moment component.
AxisLine screw_axis_line(const ScrewVector& e);

// Quaternion exponential/log helpers shared by pose arithmetic.
Quat quat_exp(const Vec3& rotvec);
Vec3 quat_log(const Quat& q);

}  // namespace flexplore
