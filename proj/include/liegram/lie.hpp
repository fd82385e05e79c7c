#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace liegram {

enum class GroupKind { SO2, SO3, SE2, SE3 };

std::string_view to_string(GroupKind kind);

// Dimension of the Lie algebra: 1, 3, 3, 6.
int algebra_dim(GroupKind kind);
int algebra_dim(std::span<const GroupKind> kinds);

// Size of the (homogeneous) matrix representation: 2, 3, 3, 4.
int matrix_dim(GroupKind kind);

// so(3) hat: the 3x3 skew-symmetric matrix with skew(a) * b = a x b.
Eigen::Matrix3d skew(const Eigen::Vector3d& w);

// Algebra coordinates are rotation-first: theta for SO(2), [theta, x, y] for
// SE(2), omega for SO(3), [omega, v] for SE(3).
Eigen::MatrixXd hat(const Eigen::VectorXd& v, GroupKind kind);
Eigen::VectorXd vee(const Eigen::MatrixXd& X, GroupKind kind);

// Block-diagonal hat/vee over a product of groups.
Eigen::MatrixXd hat(const Eigen::VectorXd& v, std::span<const GroupKind> kinds);
Eigen::VectorXd vee(const Eigen::MatrixXd& X, std::span<const GroupKind> kinds);

/// Element of SO(2), SO(3), SE(2), SE(3) or a finite product of those.
///
/// SO(2) parts (including the rotation of SE(2)) are held as an angle in
/// (-pi, pi] and only materialized as a matrix on request, so planar
/// composition is exact. SO(3) rotations are re-projected onto the group
/// whenever composition drifts them off it by more than 1e-9.
class GroupElement {
 public:
  static GroupElement identity(GroupKind kind);
  static GroupElement identity(std::span<const GroupKind> kinds);

  static GroupElement so2(double angle);
  static GroupElement se2(double angle, const Eigen::Vector2d& translation);
  // Throws InputError unless R is orthonormal to 1e-10 with det(R) > 0.
  static GroupElement so3(const Eigen::Matrix3d& rotation);
  static GroupElement se3(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  // Flattens nested products.
  static GroupElement product(std::span<const GroupElement> parts);

  std::size_t factor_count() const { return factors_.size(); }
  GroupKind kind(std::size_t factor = 0) const;
  std::vector<GroupKind> kinds() const;
  int algebra_dim() const;

  // SO(2)/SE(2) only.
  double angle(std::size_t factor = 0) const;
  Eigen::MatrixXd rotation(std::size_t factor = 0) const;
  // Empty vector for SO(2)/SO(3).
  Eigen::VectorXd translation(std::size_t factor = 0) const;

  // Block diagonal of the per-factor (homogeneous) matrices.
  Eigen::MatrixXd matrix() const;

  GroupElement operator*(const GroupElement& other) const;
  GroupElement inverse() const;

  // Single-factor view.
  GroupElement factor(std::size_t i) const;

 private:
  struct Factor {
    GroupKind kind = GroupKind::SO2;
    double angle = 0.0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  };

  explicit GroupElement(std::vector<Factor> factors) : factors_(std::move(factors)) {}
  const Factor& at(std::size_t i) const;

  std::vector<Factor> factors_;
};

GroupElement exp_map(const Eigen::VectorXd& v, GroupKind kind);
GroupElement exp_map(const Eigen::VectorXd& v, std::span<const GroupKind> kinds);

// Throws SingularityError when a rotation angle sits at pi (within 1e-12
// for planar rotations, 1e-6 for spatial ones).
Eigen::VectorXd log_map(const GroupElement& g);

// Ad(g) in the rotation-first algebra basis. For SE(3), Ad((R, p)) =
// [[R, 0], [p^ R, R]]; for SE(2), Ad((theta, p)) = [[1, 0], [(p_y, -p_x), R]].
Eigen::MatrixXd adjoint(const GroupElement& g);

// Nearest rotation in Frobenius norm (polar factor).
Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m);

}  // namespace liegram
