#include "supframe/transform.hpp"

#include <cmath>
#include <string>

#include "supframe/errors.hpp"

namespace supframe {

namespace {

void validate_parts(int dim, const Eigen::Matrix3d& rot, const Eigen::Vector3d& trans) {
    if (dim < 1 || dim > 3)
        throw ValidationError("transform dimension must be 1, 2 or 3, got " +
                              std::to_string(dim));
    if (!rot.allFinite() || !trans.allFinite())
        throw ValidationError("transform entries must be finite");

    // Embedded rows/cols beyond dim must match the identity exactly.
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i < dim && j < dim) continue;
            const double expected = (i == j) ? 1.0 : 0.0;
            if (rot(i, j) != expected)
                throw ValidationError("rotation is not embedded in dimension " +
                                      std::to_string(dim));
        }
        if (i >= dim && trans[i] != 0.0)
            throw ValidationError("translation is not embedded in dimension " +
                                  std::to_string(dim));
    }

    const double ortho = (rot.transpose() * rot - Eigen::Matrix3d::Identity()).norm();
    if (ortho >= EuclideanTransform::kOrthogonalityTol)
        throw ValidationError("rotation is not orthogonal (||R^T R - I|| = " +
                              std::to_string(ortho) + ")");
    const double det = rot.determinant();
    if (std::abs(det - 1.0) >= EuclideanTransform::kOrthogonalityTol)
        throw ValidationError("rotation must be proper (det = " + std::to_string(det) +
                              ")");
}

long long round_entry(double v) {
    return std::llround(v * 1e9);
}

}  // namespace

EuclideanTransform EuclideanTransform::identity(int dim) {
    return from_parts(dim, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
}

EuclideanTransform EuclideanTransform::line_translation(double a) {
    Eigen::Vector3d t = Eigen::Vector3d::Zero();
    t[0] = a;
    return from_parts(1, Eigen::Matrix3d::Identity(), t);
}

EuclideanTransform EuclideanTransform::planar(double angle_rad, const Eigen::Vector2d& t) {
    Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    Eigen::Vector3d trans = Eigen::Vector3d::Zero();
    trans.head<2>() = t;
    return from_parts(2, r, trans);
}

EuclideanTransform EuclideanTransform::axis_angle(const Eigen::Vector3d& axis,
                                                  double angle_rad,
                                                  const Eigen::Vector3d& t) {
    const double n = axis.norm();
    if (!(n > 0.0) || !axis.allFinite())
        throw ValidationError("rotation axis must be a nonzero finite vector");
    const Eigen::Matrix3d r =
        Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
    return from_parts(3, r, t);
}

EuclideanTransform EuclideanTransform::from_parts(int dim, const Eigen::Matrix3d& rot,
                                                  const Eigen::Vector3d& trans) {
    validate_parts(dim, rot, trans);
    return EuclideanTransform(dim, rot, trans);
}

EuclideanTransform EuclideanTransform::compose(const EuclideanTransform& rhs) const {
    if (dim_ != rhs.dim_)
        throw MismatchError("cannot compose transforms of dimension " +
                            std::to_string(dim_) + " and " + std::to_string(rhs.dim_));
    // x -> R1 (R2 x + t2) + t1
    return EuclideanTransform(dim_, rot_ * rhs.rot_, rot_ * rhs.trans_ + trans_);
}

EuclideanTransform EuclideanTransform::inverse() const {
    const Eigen::Matrix3d rinv = rot_.transpose();
    return EuclideanTransform(dim_, rinv, -(rinv * trans_));
}

double EuclideanTransform::planar_angle() const {
    if (dim_ != 2) throw DomainError("planar_angle is defined for dimension 2 only");
    return std::atan2(rot_(1, 0), rot_(0, 0));
}

std::pair<double, Eigen::Vector3d> EuclideanTransform::axis_angle_of() const {
    if (dim_ != 3) throw DomainError("axis_angle_of is defined for dimension 3 only");
    Eigen::AngleAxisd aa(rot_);
    double angle = aa.angle();
    Eigen::Vector3d axis = aa.axis();
    if (angle < 0.0) {  // canonical form: angle in [0, pi]
        angle = -angle;
        axis = -axis;
    }
    return {angle, axis};
}

std::array<long long, 13> EuclideanTransform::canonical_key() const {
    std::array<long long, 13> key{};
    key[0] = dim_;
    int k = 1;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) key[k++] = round_entry(rot_(i, j));
    for (int i = 0; i < 3; ++i) key[k++] = round_entry(trans_[i]);
    return key;
}

}  // namespace supframe
