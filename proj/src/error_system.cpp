#include "liegram/error_system.hpp"

#include "liegram/errors.hpp"
#include "liegram/linalg.hpp"

#include <string>

namespace liegram {

namespace {

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

FactorStructure::FactorStructure(std::vector<Eigen::Index> factor_dims) : dims_(std::move(factor_dims)) {
  if (dims_.empty()) throw InputError("factor structure needs at least one factor");
  for (auto d : dims_) {
    if (d <= 0) throw InputError("factor dimensions must be positive");
    offsets_.push_back(total_);
    total_ += d;
  }
}

void FactorStructure::check(std::size_t i) const {
  if (i >= dims_.size()) {
    throw InputError("factor index " + std::to_string(i) + " out of range (m = " + std::to_string(dims_.size()) +
                     ")");
  }
}

Eigen::Index FactorStructure::dim(std::size_t i) const {
  check(i);
  return dims_[i];
}

Eigen::Index FactorStructure::offset(std::size_t i) const {
  check(i);
  return offsets_[i];
}

Eigen::VectorXd FactorStructure::project(const Eigen::VectorXd& v, std::size_t j) const {
  check(j);
  if (v.size() != total_) throw InputError("project: vector length does not match algebra dimension");
  return v.segment(offsets_[j], dims_[j]);
}

Eigen::MatrixXd FactorStructure::project_rows(const Eigen::MatrixXd& m, std::size_t j) const {
  check(j);
  if (m.rows() != total_) throw InputError("project_rows: row count does not match algebra dimension");
  return m.middleRows(offsets_[j], dims_[j]);
}

Eigen::VectorXd FactorStructure::inject(const Eigen::VectorXd& u, std::size_t j) const {
  check(j);
  if (u.size() != dims_[j]) throw InputError("inject: vector length does not match factor dimension");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(total_);
  v.segment(offsets_[j], dims_[j]) = u;
  return v;
}

Eigen::MatrixXd FactorStructure::projection(std::size_t j) const {
  check(j);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dims_[j], total_);
  P.middleCols(offsets_[j], dims_[j]).setIdentity();
  return P;
}

Eigen::MatrixXd FactorStructure::block(const Eigen::MatrixXd& m, std::size_t j, std::size_t i) const {
  check(j);
  check(i);
  if (m.rows() != total_ || m.cols() != total_) throw InputError("block: matrix is not n x n");
  return m.block(offsets_[j], offsets_[i], dims_[j], dims_[i]);
}

// ---------------------------------------------------------------------------

MatrixSchedule MatrixSchedule::constant(Eigen::MatrixXd m) {
  MatrixSchedule s;
  s.source_ = std::move(m);
  return s;
}

MatrixSchedule MatrixSchedule::table(std::vector<Eigen::MatrixXd> per_step) {
  if (per_step.empty()) throw InputError("schedule table is empty");
  MatrixSchedule s;
  s.source_ = std::move(per_step);
  return s;
}

MatrixSchedule MatrixSchedule::generator(Generator g, std::optional<std::size_t> bound) {
  MatrixSchedule s;
  s.source_ = Bounded{std::move(g), bound};
  return s;
}

Eigen::MatrixXd MatrixSchedule::at(std::size_t t) const {
  if (const auto* m = std::get_if<Eigen::MatrixXd>(&source_)) return *m;
  if (const auto* tab = std::get_if<std::vector<Eigen::MatrixXd>>(&source_)) {
    if (t >= tab->size()) {
      throw InputError("schedule has " + std::to_string(tab->size()) + " steps, step " + std::to_string(t) +
                       " requested");
    }
    return (*tab)[t];
  }
  const auto& b = std::get<Bounded>(source_);
  if (b.bound && t >= *b.bound) {
    throw InputError("schedule bounded at " + std::to_string(*b.bound) + " steps, step " + std::to_string(t) +
                     " requested");
  }
  return b.fn(t);
}

std::optional<std::size_t> MatrixSchedule::bound() const {
  if (std::holds_alternative<Eigen::MatrixXd>(source_)) return std::nullopt;
  if (const auto* tab = std::get_if<std::vector<Eigen::MatrixXd>>(&source_)) return tab->size();
  return std::get<Bounded>(source_).bound;
}

// ---------------------------------------------------------------------------

ErrorSystem::ErrorSystem(FactorStructure factors, const MatrixSchedule& F, const MatrixSchedule& Q,
                         std::size_t horizon)
    : factors_(std::move(factors)), horizon_(horizon) {
  const Eigen::Index n = factors_.total_dim();
  F_.reserve(horizon_);
  Q_.reserve(horizon_);
  phi_.reserve(horizon_ + 1);
  phi_.push_back(Eigen::MatrixXd::Identity(n, n));
  for (std::size_t t = 0; t < horizon_; ++t) {
    Eigen::MatrixXd f = F.at(t);
    Eigen::MatrixXd q = Q.at(t);
    if (f.rows() != n || f.cols() != n) {
      throw InputError("F_" + std::to_string(t) + " is " + shape(f) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
    if (q.rows() != n || q.cols() != n) {
      throw InputError("Q_" + std::to_string(t) + " is " + shape(q) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
    if (!f.allFinite() || !q.allFinite()) throw InputError("non-finite entry at step " + std::to_string(t));
    if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q.norm())) {
      throw InputError("Q_" + std::to_string(t) + " is not symmetric");
    }
    if (min_eigenvalue(q) < -1e-12) {
      throw InputError("Q_" + std::to_string(t) + " is not positive semidefinite");
    }
    phi_.push_back(f * phi_.back());
    F_.push_back(std::move(f));
    Q_.push_back(std::move(q));
  }
}

const Eigen::MatrixXd& ErrorSystem::F(std::size_t t) const {
  if (t >= horizon_) throw InputError("F_t requested beyond the system horizon");
  return F_[t];
}

const Eigen::MatrixXd& ErrorSystem::Q(std::size_t t) const {
  if (t >= horizon_) throw InputError("Q_t requested beyond the system horizon");
  return Q_[t];
}

const Eigen::MatrixXd& ErrorSystem::transition_from_start(std::size_t t) const {
  if (t > horizon_) {
    throw InputError("Phi(" + std::to_string(t) + ", 0) requested beyond horizon " + std::to_string(horizon_));
  }
  return phi_[t];
}

Eigen::MatrixXd ErrorSystem::transition(std::size_t t, std::size_t tau) const {
  if (t < tau) throw InputError("transition(t, tau) needs t >= tau");
  if (t > horizon_) throw InputError("transition requested beyond the system horizon");
  if (tau == 0) return phi_[t];
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(dim(), dim());
  for (std::size_t s = tau; s < t; ++s) phi = F_[s] * phi;
  return phi;
}

Eigen::MatrixXd ErrorSystem::cross_block(std::size_t j, std::size_t i, std::size_t t) const {
  return factors_.block(transition_from_start(t), j, i);
}

// ---------------------------------------------------------------------------

Channel::Channel(std::string name, FactorStructure factors, std::optional<std::size_t> factor, MatrixSchedule H,
                 Eigen::MatrixXd R)
    : name_(std::move(name)), factors_(std::move(factors)), factor_(factor), H_(std::move(H)), R_(std::move(R)) {
  if (R_.rows() == 0 || R_.rows() != R_.cols()) throw InputError("channel '" + name_ + "': R must be square");
  if (!R_.allFinite() || (R_ - R_.transpose()).norm() > 1e-12 * std::max(1.0, R_.norm())) {
    throw InputError("channel '" + name_ + "': R must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(R_);
  if (llt.info() != Eigen::Success) throw InputError("channel '" + name_ + "': R is not positive definite");
  R_inv_ = symmetrized(llt.solve(Eigen::MatrixXd::Identity(R_.rows(), R_.cols())));
  if (factor_) factors_.dim(*factor_);
  // Validate shape eagerly on the first step.
  checked(H_.at(0), 0);
}

Channel Channel::global(std::string name, const FactorStructure& factors, MatrixSchedule H, Eigen::MatrixXd R) {
  return Channel(std::move(name), factors, std::nullopt, std::move(H), std::move(R));
}

Channel Channel::local(std::string name, const FactorStructure& factors, std::size_t factor,
                       MatrixSchedule H_local, Eigen::MatrixXd R) {
  return Channel(std::move(name), factors, factor, std::move(H_local), std::move(R));
}

Channel Channel::tagged(std::string name, const FactorStructure& factors, std::size_t factor,
                        const Eigen::MatrixXd& H, Eigen::MatrixXd R) {
  const Eigen::Index o = factors.offset(factor), d = factors.dim(factor);
  if (H.cols() != factors.total_dim()) {
    throw InputError("channel '" + name + "': H has " + std::to_string(H.cols()) + " columns, expected " +
                     std::to_string(factors.total_dim()));
  }
  Eigen::MatrixXd outside = H;
  outside.middleCols(o, d).setZero();
  if (outside.cwiseAbs().maxCoeff() != 0.0) {
    throw InputError("channel '" + name + "': H is nonzero outside the columns of factor " +
                     std::to_string(factor));
  }
  return local(std::move(name), factors, factor, MatrixSchedule::constant(H.middleCols(o, d)), std::move(R));
}

Eigen::MatrixXd Channel::checked(Eigen::MatrixXd h, std::size_t t) const {
  const Eigen::Index cols = factor_ ? factors_.dim(*factor_) : factors_.total_dim();
  if (h.rows() != R_.rows() || h.cols() != cols) {
    throw InputError("channel '" + name_ + "': H at step " + std::to_string(t) + " is " + shape(h) +
                     ", expected " + std::to_string(R_.rows()) + "x" + std::to_string(cols));
  }
  if (!h.allFinite()) throw InputError("channel '" + name_ + "': non-finite H");
  return h;
}

Eigen::MatrixXd Channel::local_H(std::size_t t) const {
  if (!factor_) throw InputError("channel '" + name_ + "' is not factor-local");
  return checked(H_.at(t), t);
}

Eigen::MatrixXd Channel::H(std::size_t t) const {
  Eigen::MatrixXd h = checked(H_.at(t), t);
  if (!factor_) return h;
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(h.rows(), factors_.total_dim());
  full.middleCols(factors_.offset(*factor_), h.cols()) = h;
  return full;
}

Eigen::MatrixXd Channel::information(std::size_t t) const {
  const Eigen::MatrixXd h = H(t);
  return symmetrized(h.transpose() * R_inv_ * h);
}

Eigen::MatrixXd spatial_information(std::span<const Channel> channels, Eigen::Index n, std::size_t t) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : channels) {
    if (c.state_dim() != n) throw InputError("channel '" + c.name() + "' does not match the state dimension");
    S += c.information(t);
  }
  return S;
}

}  // namespace liegram
