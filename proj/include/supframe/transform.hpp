#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>

namespace supframe {

/// Label naming a reference frame ("O", "O'", ...).  Purely symbolic;
/// the geometry lives in the transforms between frames.
struct FrameId {
    std::string label;

    friend bool operator==(const FrameId& a, const FrameId& b) {
        return a.label == b.label;
    }
    friend bool operator!=(const FrameId& a, const FrameId& b) {
        return !(a == b);
    }
};

/// One rigid Euclidean motion x -> R x + t with a proper rotation R.
///
/// Works in spatial dimension 1, 2 or 3; lower dimensions are embedded
/// in the top-left block of a 3x3 matrix so a single representation and
/// a single total order cover all cases.  In dimension 1 the rotation
/// group is trivial and only translations remain.
class EuclideanTransform {
public:
    /// Orthogonality / determinant tolerance enforced at construction.
    static constexpr double kOrthogonalityTol = 1e-12;
    /// Two transforms are considered the same support point when both
    /// the rotation Frobenius distance and the translation Euclidean
    /// distance are below this.
    static constexpr double kEqualityTol = 1e-9;

    static EuclideanTransform identity(int dim);

    /// 1-D rigid motion: translation by `a`.
    static EuclideanTransform line_translation(double a);

    /// 2-D rotation by `angle_rad` about the origin, then translation.
    static EuclideanTransform planar(double angle_rad,
                                     const Eigen::Vector2d& t = Eigen::Vector2d::Zero());

    /// 3-D rotation about `axis` (need not be normalized) by `angle_rad`,
    /// then translation.
    static EuclideanTransform axis_angle(const Eigen::Vector3d& axis, double angle_rad,
                                         const Eigen::Vector3d& t = Eigen::Vector3d::Zero());

    /// General constructor; validates orthogonality, det = +1 and the
    /// embedding shape.  `rot`/`trans` are given in embedded 3x3 / 3-vector
    /// form (rows/cols beyond `dim` must match the identity).
    static EuclideanTransform from_parts(int dim, const Eigen::Matrix3d& rot,
                                         const Eigen::Vector3d& trans);

    int dim() const { return dim_; }
    const Eigen::Matrix3d& rotation() const { return rot_; }
    const Eigen::Vector3d& translation() const { return trans_; }

    Eigen::Vector3d apply(const Eigen::Vector3d& x) const { return rot_ * x + trans_; }
    Eigen::Vector2d apply2(const Eigen::Vector2d& x) const {
        return rot_.topLeftCorner<2, 2>() * x + trans_.head<2>();
    }
    double apply1(double x) const { return x + trans_[0]; }

    /// this ∘ rhs: first move by rhs, then by this.
    EuclideanTransform compose(const EuclideanTransform& rhs) const;
    EuclideanTransform inverse() const;

    double rotation_distance(const EuclideanTransform& other) const {
        return (rot_ - other.rot_).norm();
    }
    double translation_distance(const EuclideanTransform& other) const {
        return (trans_ - other.trans_).norm();
    }
    bool approx_equal(const EuclideanTransform& other, double tol = kEqualityTol) const {
        return dim_ == other.dim_ && rotation_distance(other) < tol &&
               translation_distance(other) < tol;
    }
    bool is_identity(double tol = kEqualityTol) const {
        return approx_equal(identity(dim_), tol);
    }

    /// Signed rotation angle in (-pi, pi], dimension 2 only.
    double planar_angle() const;

    /// Canonical axis-angle pair with angle in [0, pi]; negative-angle
    /// inputs come back with the axis flipped.  Dimension 3 only.
    std::pair<double, Eigen::Vector3d> axis_angle_of() const;

    /// Fixed total order used for canonical term ordering: dimension,
    /// then rotation entries rounded to a 1e-9 grid, then translation
    /// entries.  Rounding keeps the order stable under floating-point
    /// noise from repeated products.
    std::array<long long, 13> canonical_key() const;

    friend bool operator<(const EuclideanTransform& a, const EuclideanTransform& b) {
        return a.canonical_key() < b.canonical_key();
    }

private:
    EuclideanTransform(int dim, Eigen::Matrix3d rot, Eigen::Vector3d trans)
        : dim_(dim), rot_(std::move(rot)), trans_(std::move(trans)) {}

    int dim_;
    Eigen::Matrix3d rot_;
    Eigen::Vector3d trans_;
};

}  // namespace supframe
