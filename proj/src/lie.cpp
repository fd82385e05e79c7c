#include "liegram/lie.hpp"

#include "liegram/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace liegram {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPlanarCutMargin = 1e-12;
constexpr double kSpatialCutMargin = 1e-6;
constexpr double kOrthonormalTol = 1e-10;
constexpr double kDriftTol = 1e-9;

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Eigen::Matrix2d rot2(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  return R;
}

void check_dim(const Eigen::VectorXd& v, GroupKind kind) {
  if (v.size() != algebra_dim(kind)) {
    throw InputError("algebra vector for " + std::string(to_string(kind)) + " needs " +
                     std::to_string(algebra_dim(kind)) + " coordinates, got " +
                     std::to_string(v.size()));
  }
}

void check_rotation(const Eigen::Matrix3d& R) {
  if (!R.allFinite() || (R.transpose() * R - Eigen::Matrix3d::Identity()).norm() >= kOrthonormalTol ||
      R.determinant() <= 0.0) {
    throw InputError("matrix is not a proper rotation");
  }
}

// Coefficients of the SO(3) exponential: sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3.
struct RodriguesCoeffs {
  double a, b, c;
};

RodriguesCoeffs rodrigues(double theta) {
  const double t2 = theta * theta;
  if (theta < 1e-2) {
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  const double s = std::sin(theta), h = std::sin(0.5 * theta);
  return {s / theta, 2.0 * h * h / t2, (theta - s) / (t2 * theta)};
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w, Eigen::Matrix3d* left_jacobian = nullptr) {
  const double theta = w.norm();
  const auto k = rodrigues(theta);
  const Eigen::Matrix3d W = skew(w);
  const Eigen::Matrix3d W2 = W * W;
  if (left_jacobian != nullptr) {
    *left_jacobian = Eigen::Matrix3d::Identity() + k.b * W + k.c * W2;
  }
  return Eigen::Matrix3d::Identity() + k.a * W + k.b * W2;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const Eigen::Vector3d axis2(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double s = 0.5 * axis2.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta > kPi - kSpatialCutMargin) {
    throw SingularityError("SO(3) logarithm undefined at rotation angle pi");
  }
  // theta / (2 sin theta), series near zero.
  const double scale = theta < 1e-4 ? 0.5 + theta * theta / 12.0 : theta / (2.0 * std::sin(theta));
  return scale * axis2;
}

// Planar left Jacobian: p = V(theta) u.
Eigen::Matrix2d se2_v(double theta) {
  double a, b;  // sin(t)/t, (1-cos t)/t
  if (std::abs(theta) < 1e-4) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = theta / 2.0 - theta * t2 / 24.0;
  } else {
    const double h = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * h * h / theta;
  }
  Eigen::Matrix2d V;
  V << a, -b, b, a;
  return V;
}

}  // namespace

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::SO2: return "SO2";
    case GroupKind::SO3: return "SO3";
    case GroupKind::SE2: return "SE2";
    case GroupKind::SE3: return "SE3";
  }
  return "?";
}

int algebra_dim(GroupKind kind) {
  switch (kind) {
    case GroupKind::SO2: return 1;
    case GroupKind::SO3: return 3;
    case GroupKind::SE2: return 3;
    case GroupKind::SE3: return 6;
  }
  return 0;
}

int algebra_dim(std::span<const GroupKind> kinds) {
  int n = 0;
  for (auto k : kinds) n += algebra_dim(k);
  return n;
}

int matrix_dim(GroupKind kind) {
  switch (kind) {
    case GroupKind::SO2: return 2;
    case GroupKind::SO3: return 3;
    case GroupKind::SE2: return 3;
    case GroupKind::SE3: return 4;
  }
  return 0;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d S;
  S << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return S;
}

Eigen::MatrixXd hat(const Eigen::VectorXd& v, GroupKind kind) {
  check_dim(v, kind);
  const int m = matrix_dim(kind);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(m, m);
  switch (kind) {
    case GroupKind::SO2:
      X(0, 1) = -v(0);
      X(1, 0) = v(0);
      break;
    case GroupKind::SE2:
      X(0, 1) = -v(0);
      X(1, 0) = v(0);
      X(0, 2) = v(1);
      X(1, 2) = v(2);
      break;
    case GroupKind::SO3:
      X = skew(v.head<3>());
      break;
    case GroupKind::SE3:
      X.topLeftCorner<3, 3>() = skew(v.head<3>());
      X.topRightCorner<3, 1>() = v.tail<3>();
      break;
  }
  return X;
}

Eigen::VectorXd vee(const Eigen::MatrixXd& X, GroupKind kind) {
  const int m = matrix_dim(kind);
  if (X.rows() != m || X.cols() != m) {
    throw InputError("vee: expected a " + std::to_string(m) + "x" + std::to_string(m) + " matrix for " +
                     std::string(to_string(kind)));
  }
  Eigen::VectorXd v(algebra_dim(kind));
  switch (kind) {
    case GroupKind::SO2:
      v << X(1, 0);
      break;
    case GroupKind::SE2:
      v << X(1, 0), X(0, 2), X(1, 2);
      break;
    case GroupKind::SO3:
      v << X(2, 1), X(0, 2), X(1, 0);
      break;
    case GroupKind::SE3:
      v << X(2, 1), X(0, 2), X(1, 0), X(0, 3), X(1, 3), X(2, 3);
      break;
  }
  return v;
}

Eigen::MatrixXd hat(const Eigen::VectorXd& v, std::span<const GroupKind> kinds) {
  if (v.size() != algebra_dim(kinds)) throw InputError("hat: algebra vector has wrong length for product");
  int m = 0;
  for (auto k : kinds) m += matrix_dim(k);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(m, m);
  int row = 0, coord = 0;
  for (auto k : kinds) {
    const int d = algebra_dim(k), s = matrix_dim(k);
    X.block(row, row, s, s) = hat(v.segment(coord, d), k);
    row += s;
    coord += d;
  }
  return X;
}

Eigen::VectorXd vee(const Eigen::MatrixXd& X, std::span<const GroupKind> kinds) {
  int m = 0;
  for (auto k : kinds) m += matrix_dim(k);
  if (X.rows() != m || X.cols() != m) throw InputError("vee: matrix has wrong size for product");
  Eigen::VectorXd v(algebra_dim(kinds));
  int row = 0, coord = 0;
  for (auto k : kinds) {
    const int d = algebra_dim(k), s = matrix_dim(k);
    v.segment(coord, d) = vee(X.block(row, row, s, s), k);
    row += s;
    coord += d;
  }
  return v;
}

Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d& V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * V.transpose();
}

// ---------------------------------------------------------------------------

GroupElement GroupElement::identity(GroupKind kind) {
  Factor f;
  f.kind = kind;
  return GroupElement({f});
}

GroupElement GroupElement::identity(std::span<const GroupKind> kinds) {
  std::vector<Factor> fs;
  for (auto k : kinds) {
    Factor f;
    f.kind = k;
    fs.push_back(f);
  }
  return GroupElement(std::move(fs));
}

GroupElement GroupElement::so2(double angle) {
  Factor f;
  f.kind = GroupKind::SO2;
  f.angle = wrap_angle(angle);
  return GroupElement({f});
}

GroupElement GroupElement::se2(double angle, const Eigen::Vector2d& translation) {
  Factor f;
  f.kind = GroupKind::SE2;
  f.angle = wrap_angle(angle);
  f.translation.head<2>() = translation;
  return GroupElement({f});
}

GroupElement GroupElement::so3(const Eigen::Matrix3d& rotation) {
  check_rotation(rotation);
  Factor f;
  f.kind = GroupKind::SO3;
  f.rotation = rotation;
  return GroupElement({f});
}

GroupElement GroupElement::se3(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
  check_rotation(rotation);
  if (!translation.allFinite()) throw InputError("translation is not finite");
  Factor f;
  f.kind = GroupKind::SE3;
  f.rotation = rotation;
  f.translation = translation;
  return GroupElement({f});
}

GroupElement GroupElement::product(std::span<const GroupElement> parts) {
  std::vector<Factor> fs;
  for (const auto& p : parts) fs.insert(fs.end(), p.factors_.begin(), p.factors_.end());
  if (fs.empty()) throw InputError("product of zero groups");
  return GroupElement(std::move(fs));
}

const GroupElement::Factor& GroupElement::at(std::size_t i) const {
  if (i >= factors_.size()) throw InputError("group factor index out of range");
  return factors_[i];
}

GroupKind GroupElement::kind(std::size_t factor) const { return at(factor).kind; }

std::vector<GroupKind> GroupElement::kinds() const {
  std::vector<GroupKind> ks;
  for (const auto& f : factors_) ks.push_back(f.kind);
  return ks;
}

int GroupElement::algebra_dim() const {
  int n = 0;
  for (const auto& f : factors_) n += liegram::algebra_dim(f.kind);
  return n;
}

double GroupElement::angle(std::size_t factor) const {
  const auto& f = at(factor);
  if (f.kind != GroupKind::SO2 && f.kind != GroupKind::SE2) throw InputError("angle() needs a planar factor");
  return f.angle;
}

Eigen::MatrixXd GroupElement::rotation(std::size_t factor) const {
  const auto& f = at(factor);
  if (f.kind == GroupKind::SO2 || f.kind == GroupKind::SE2) return rot2(f.angle);
  return f.rotation;
}

Eigen::VectorXd GroupElement::translation(std::size_t factor) const {
  const auto& f = at(factor);
  switch (f.kind) {
    case GroupKind::SE2: return f.translation.head<2>();
    case GroupKind::SE3: return f.translation;
    default: return Eigen::VectorXd();
  }
}

Eigen::MatrixXd GroupElement::matrix() const {
  int m = 0;
  for (const auto& f : factors_) m += matrix_dim(f.kind);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  int o = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    const int s = matrix_dim(f.kind);
    Eigen::MatrixXd block = Eigen::MatrixXd::Identity(s, s);
    const Eigen::MatrixXd R = rotation(i);
    block.topLeftCorner(R.rows(), R.cols()) = R;
    if (f.kind == GroupKind::SE2 || f.kind == GroupKind::SE3) {
      block.topRightCorner(R.rows(), 1) = translation(i);
    }
    M.block(o, o, s, s) = block;
    o += s;
  }
  return M;
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (kinds() != other.kinds()) throw InputError("cannot compose elements of different groups");
  std::vector<Factor> out = factors_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    Factor& a = out[i];
    const Factor& b = other.factors_[i];
    switch (a.kind) {
      case GroupKind::SO2:
        a.angle = wrap_angle(a.angle + b.angle);
        break;
      case GroupKind::SE2:
        a.translation.head<2>() += rot2(a.angle) * b.translation.head<2>();
        a.angle = wrap_angle(a.angle + b.angle);
        break;
      case GroupKind::SO3:
      case GroupKind::SE3:
        a.translation += a.rotation * b.translation;
        a.rotation = a.rotation * b.rotation;
        if ((a.rotation.transpose() * a.rotation - Eigen::Matrix3d::Identity()).norm() > kDriftTol) {
          a.rotation = project_to_rotation(a.rotation);
        }
        break;
    }
  }
  return GroupElement(std::move(out));
}

GroupElement GroupElement::inverse() const {
  std::vector<Factor> out = factors_;
  for (auto& f : out) {
    switch (f.kind) {
      case GroupKind::SO2:
        f.angle = wrap_angle(-f.angle);
        break;
      case GroupKind::SE2:
        f.translation.head<2>() = -(rot2(f.angle).transpose() * f.translation.head<2>());
        f.angle = wrap_angle(-f.angle);
        break;
      case GroupKind::SO3:
      case GroupKind::SE3:
        f.rotation.transposeInPlace();
        f.translation = -(f.rotation * f.translation);
        break;
    }
  }
  return GroupElement(std::move(out));
}

GroupElement GroupElement::factor(std::size_t i) const { return GroupElement({at(i)}); }

// ---------------------------------------------------------------------------

GroupElement exp_map(const Eigen::VectorXd& v, GroupKind kind) {
  check_dim(v, kind);
  switch (kind) {
    case GroupKind::SO2:
      return GroupElement::so2(v(0));
    case GroupKind::SE2:
      return GroupElement::se2(v(0), se2_v(v(0)) * v.segment<2>(1));
    case GroupKind::SO3:
      return GroupElement::so3(so3_exp(v.head<3>()));
    case GroupKind::SE3: {
      Eigen::Matrix3d V;
      const Eigen::Matrix3d R = so3_exp(v.head<3>(), &V);
      return GroupElement::se3(R, V * v.tail<3>());
    }
  }
  return GroupElement::identity(kind);
}

GroupElement exp_map(const Eigen::VectorXd& v, std::span<const GroupKind> kinds) {
  if (v.size() != algebra_dim(kinds)) throw InputError("exp_map: algebra vector has wrong length for product");
  std::vector<GroupElement> parts;
  int o = 0;
  for (auto k : kinds) {
    const int d = algebra_dim(k);
    parts.push_back(exp_map(v.segment(o, d), k));
    o += d;
  }
  return GroupElement::product(parts);
}

Eigen::VectorXd log_map(const GroupElement& g) {
  Eigen::VectorXd out(g.algebra_dim());
  int o = 0;
  for (std::size_t i = 0; i < g.factor_count(); ++i) {
    const GroupKind k = g.kind(i);
    switch (k) {
      case GroupKind::SO2:
      case GroupKind::SE2: {
        const double a = g.angle(i);
        if (std::abs(a) > kPi - kPlanarCutMargin) {
          throw SingularityError("SO(2) logarithm undefined at rotation angle pi");
        }
        out(o) = a;
        if (k == GroupKind::SE2) {
          const Eigen::Vector2d p = g.translation(i);
          out.segment<2>(o + 1) = se2_v(a).partialPivLu().solve(p);
        }
        break;
      }
      case GroupKind::SO3:
      case GroupKind::SE3: {
        const Eigen::Matrix3d R = g.rotation(i);
        const Eigen::Vector3d w = so3_log(R);
        out.segment<3>(o) = w;
        if (k == GroupKind::SE3) {
          Eigen::Matrix3d V;
          so3_exp(w, &V);
          const Eigen::Vector3d p = g.translation(i);
          out.segment<3>(o + 3) = V.partialPivLu().solve(p);
        }
        break;
      }
    }
    o += algebra_dim(k);
  }
  return out;
}

Eigen::MatrixXd adjoint(const GroupElement& g) {
  const int n = g.algebra_dim();
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Zero(n, n);
  int o = 0;
  for (std::size_t i = 0; i < g.factor_count(); ++i) {
    const GroupKind k = g.kind(i);
    switch (k) {
      case GroupKind::SO2:
        Ad(o, o) = 1.0;
        break;
      case GroupKind::SE2: {
        const Eigen::Vector2d p = g.translation(i);
        Ad(o, o) = 1.0;
        Ad(o + 1, o) = p.y();
        Ad(o + 2, o) = -p.x();
        Ad.block<2, 2>(o + 1, o + 1) = g.rotation(i);
        break;
      }
      case GroupKind::SO3:
        Ad.block<3, 3>(o, o) = g.rotation(i);
        break;
      case GroupKind::SE3: {
        const Eigen::Matrix3d R = g.rotation(i);
        const Eigen::Vector3d p = g.translation(i);
        Ad.block<3, 3>(o, o) = R;
        Ad.block<3, 3>(o + 3, o + 3) = R;
        Ad.block<3, 3>(o + 3, o) = skew(p) * R;
        break;
      }
    }
    o += algebra_dim(k);
  }
  return Ad;
}

}  // namespace liegram
