#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace liegram {

/// Direct-sum split of the algebra into factors g_1 + ... + g_m, each
/// occupying a contiguous coordinate range.
class FactorStructure {
 public:
  explicit FactorStructure(std::vector<Eigen::Index> factor_dims);

  std::size_t factor_count() const { return dims_.size(); }
  Eigen::Index dim(std::size_t i) const;
  Eigen::Index offset(std::size_t i) const;
  Eigen::Index total_dim() const { return total_; }
  const std::vector<Eigen::Index>& dims() const { return dims_; }

  // Pi_j applied to a vector, or to the rows of a matrix.
  Eigen::VectorXd project(const Eigen::VectorXd& v, std::size_t j) const;
  Eigen::MatrixXd project_rows(const Eigen::MatrixXd& m, std::size_t j) const;
  // iota_j.
  Eigen::VectorXd inject(const Eigen::VectorXd& u, std::size_t j) const;
  // Pi_j as a d_j x n matrix.
  Eigen::MatrixXd projection(std::size_t j) const;
  // Rows of factor j, columns of factor i: Pi_j M iota_i.
  Eigen::MatrixXd block(const Eigen::MatrixXd& m, std::size_t j, std::size_t i) const;

  bool operator==(const FactorStructure&) const = default;

 private:
  void check(std::size_t i) const;

  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
};

/// Time-indexed matrix sequence t -> M_t: a constant, a finite table, or a
/// generator with an optional bound.
class MatrixSchedule {
 public:
  using Generator = std::function<Eigen::MatrixXd(std::size_t)>;

  MatrixSchedule() = default;
  static MatrixSchedule constant(Eigen::MatrixXd m);
  static MatrixSchedule table(std::vector<Eigen::MatrixXd> per_step);
  static MatrixSchedule generator(Generator g, std::optional<std::size_t> bound = std::nullopt);

  // Throws InputError for t beyond a table or generator bound.
  Eigen::MatrixXd at(std::size_t t) const;
  // Number of defined steps, if finite.
  std::optional<std::size_t> bound() const;
  bool is_constant() const { return std::holds_alternative<Eigen::MatrixXd>(source_); }

 private:
  struct Bounded {
    Generator fn;
    std::optional<std::size_t> bound;
  };
  std::variant<Eigen::MatrixXd, std::vector<Eigen::MatrixXd>, Bounded> source_ = Eigen::MatrixXd();
};

/// Linearized error dynamics dx_{t+1} = F_t dx_t + w_t, w_t ~ N(0, Q_t),
/// over a factored algebra, for steps t < horizon.
///
/// F_t, Q_t and the transition operators Phi(t, 0) for t <= horizon are
/// evaluated once at construction; the object is immutable afterwards and
/// safe to share between threads.
class ErrorSystem {
 public:
  // Throws InputError if any F_t/Q_t has the wrong shape or is non-finite,
  // or if some Q_t is asymmetric or has an eigenvalue below -1e-12.
  ErrorSystem(FactorStructure factors, const MatrixSchedule& F, const MatrixSchedule& Q,
              std::size_t horizon);

  const FactorStructure& factors() const { return factors_; }
  Eigen::Index dim() const { return factors_.total_dim(); }
  std::size_t horizon() const { return horizon_; }

  const Eigen::MatrixXd& F(std::size_t t) const;
  const Eigen::MatrixXd& Q(std::size_t t) const;

  // Phi(t, 0), t <= horizon.
  const Eigen::MatrixXd& transition_from_start(std::size_t t) const;
  // Phi(t, tau) = F_{t-1} ... F_tau; identity when t == tau. Throws
  // InputError when t < tau or t > horizon.
  Eigen::MatrixXd transition(std::size_t t, std::size_t tau) const;
  // Pi_j Phi(t, 0) iota_i.
  Eigen::MatrixXd cross_block(std::size_t j, std::size_t i, std::size_t t) const;

 private:
  FactorStructure factors_;
  std::size_t horizon_;
  std::vector<Eigen::MatrixXd> F_;
  std::vector<Eigen::MatrixXd> Q_;
  std::vector<Eigen::MatrixXd> phi_;
};

/// One observation channel dy_t = H_t dx_t + v_t, v_t ~ N(0, R).
///
/// A factor-local channel stores only its local map H~_t acting on g_i and
/// materializes H_t = H~_t Pi_i on request.
class Channel {
 public:
  // Throws InputError unless R is symmetric positive definite and H has n
  // columns.
  static Channel global(std::string name, const FactorStructure& factors, MatrixSchedule H,
                        Eigen::MatrixXd R);
  static Channel local(std::string name, const FactorStructure& factors, std::size_t factor,
                       MatrixSchedule H_local, Eigen::MatrixXd R);
  // Full-width constant H tagged as local to `factor`; rejects H with any
  // nonzero entry outside that factor's columns.
  static Channel tagged(std::string name, const FactorStructure& factors, std::size_t factor,
                        const Eigen::MatrixXd& H, Eigen::MatrixXd R);

  const std::string& name() const { return name_; }
  std::optional<std::size_t> factor() const { return factor_; }
  Eigen::Index measurement_dim() const { return R_.rows(); }
  Eigen::Index state_dim() const { return factors_.total_dim(); }
  const FactorStructure& factors() const { return factors_; }

  Eigen::MatrixXd H(std::size_t t) const;
  // Requires a factor-local channel.
  Eigen::MatrixXd local_H(std::size_t t) const;
  const Eigen::MatrixXd& R() const { return R_; }
  const Eigen::MatrixXd& R_inverse() const { return R_inv_; }
  // H_t^T R^-1 H_t.
  Eigen::MatrixXd information(std::size_t t) const;

 private:
  Channel(std::string name, FactorStructure factors, std::optional<std::size_t> factor, MatrixSchedule H,
          Eigen::MatrixXd R);
  Eigen::MatrixXd checked(Eigen::MatrixXd h, std::size_t t) const;

  std::string name_;
  FactorStructure factors_;
  std::optional<std::size_t> factor_;
  MatrixSchedule H_;
  Eigen::MatrixXd R_;
  Eigen::MatrixXd R_inv_;
};

// S_t = sum_k H_t^(k)T R_k^-1 H_t^(k); zero n x n for no channels.
Eigen::MatrixXd spatial_information(std::span<const Channel> channels, Eigen::Index n, std::size_t t);

}  // namespace liegram
