#pragma once

// Pair potentials, their certification against the stability assumptions,
// the relative energy H_Delta(eta|xi) and its local increments.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gammagibbs/kernels.hpp"
#include "gammagibbs/lattice.hpp"
#include "gammagibbs/measure.hpp"
#include "gammagibbs/spatial_index.hpp"

namespace gammagibbs {

enum class PotentialFamily { Zero, Step, CoreShell, Custom };

using PairFunction = std::function<double(std::span<const double>, std::span<const double>)>;

/// A symmetric bounded pair potential phi(x, y).
///
/// Built-in families are radial with analytic constants:
///   step:       A on |x-y| <= radius
///   core-shell: A on |x-y| <= core, -depth on core < |x-y| <= range
class PairPotential {
public:
    static PairPotential zero();
    static PairPotential step(double A, double radius);
    static PairPotential core_shell(double A, double depth, double core, double range);
    static PairPotential custom(PairFunction phi, std::string name = "custom");

    PotentialFamily family() const { return family_; }
    std::string name() const;
    double strength() const { return A_; }
    double depth() const { return depth_; }
    double core() const { return core_; }
    /// Support radius of a built-in family (0 for zero, unknown for custom).
    double support() const { return support_; }

    double operator()(std::span<const double> x, std::span<const double> y) const;
    /// Radial profile for the vector kernels; empty for custom potentials.
    std::optional<kernels::RadialProfile> profile() const;

    /// Same potential multiplied by `factor` (custom potentials are wrapped).
    PairPotential scaled(double factor) const;

private:
    PotentialFamily family_ = PotentialFamily::Zero;
    double A_ = 0.0, depth_ = 0.0, core_ = 0.0, support_ = 0.0;
    std::string name_;
    std::shared_ptr<const PairFunction> fn_;
};

/// Certified potential plus the constants the bounds are expressed in.
struct PotentialSpec {
    PairPotential potential;
    CubeGrid grid;
    double range = 0.0;     // R
    double sup_norm = 0.0;  // ||phi||_inf
    double b = 0.0;         // -inf (phi ^ 0)
    double delta = 0.0;     // repulsion radius
    double A_delta = 0.0;   // inf of phi over |x-y| <= delta
    double m_phi = 0.0;     // interaction parameter
    bool certified = false;
    bool numeric = false;   // constants estimated on a quasi-random grid
    /// Whether H carries the self-pair term phi(x,x) s_x^2.
    bool include_diagonal = true;

    double phi(std::span<const double> x, std::span<const double> y) const { return potential(x, y); }
    double self_value(std::span<const double> x) const { return potential(x, x); }
};

/// Violated clause of the stability assumptions with its witness.
struct Rejection {
    std::string clause;  // "finite_range", "lower_bound", "repulsion_condition", "symmetry"
    std::vector<double> x, y;
    double value = 0.0;      // offending quantity (phi(x,y), or A_delta for the repulsion clause)
    double threshold = 0.0;  // what it had to beat (2 m b for the repulsion clause)
    std::string message;
};

class CertificationError : public std::invalid_argument {
public:
    explicit CertificationError(Rejection r);
    const Rejection& rejection() const { return rejection_; }

private:
    Rejection rejection_;
};

/// Checks finite range, boundedness and A_delta > 2 m b. Built-in families use
/// analytic constants; custom ones are probed on 10^5 quasi-random pairs.
std::variant<PotentialSpec, Rejection> certify(const PairPotential& potential, const CubeGrid& grid);
PotentialSpec certify_or_throw(const PairPotential& potential, const CubeGrid& grid);
/// Same constants without enforcing the repulsion clause (oracle cases, controls).
PotentialSpec uncertified(const PairPotential& potential, const CubeGrid& grid);

struct Birth {
    std::vector<double> x;
    double s;
};
struct Death {
    std::size_t id;
};
struct Resize {
    std::size_t id;
    double s_new;
};
using Move = std::variant<Birth, Death, Resize>;

/// H_Delta(.|xi) for one window and boundary condition, with cube-bucketed
/// indexes of the boundary (static) and the configuration (kept in sync by apply()).
class LocalEnergy {
public:
    LocalEnergy(PotentialSpec spec, Window window, const DiscreteMeasure& xi);

    const PotentialSpec& spec() const { return spec_; }
    const Window& window() const { return window_; }
    /// Boundary atoms that can interact with the window.
    const DiscreteMeasure& boundary() const { return xi_; }

    /// Rebuilds the configuration index; every atom of eta must lie in the window.
    void reset(const DiscreteMeasure& eta);
    double hamiltonian(const DiscreteMeasure& eta) const;
    double increment(const DiscreteMeasure& eta, const Move& move) const;
    /// Applies the move to eta and to the index.
    void apply(DiscreteMeasure& eta, const Move& move);

    /// sum over configuration atoms (minus `skip`) of phi(x, y) s_y.
    double config_field(std::span<const double> x, std::optional<std::size_t> skip = {}) const;
    /// sum over boundary atoms of phi(x, y) s_y.
    double boundary_field(std::span<const double> x) const;
    double diagonal(std::span<const double> x) const;

private:
    PotentialSpec spec_;
    Window window_;
    DiscreteMeasure xi_;
    std::optional<kernels::RadialProfile> profile_;
    SpatialIndex eta_index_;
    SpatialIndex xi_index_;
    PairEvaluator eval_;
    PairFunction custom_;
};

/// H_Delta(eta|xi) = sum_{x,x' in eta_Delta} phi s s' + 2 sum_{x in Delta, y in xi outside Delta} phi s s_y.
double hamiltonian(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                   const PotentialSpec& spec);
/// hamiltonian(after) - hamiltonian(before) computed from the neighbors of the move only.
double energy_increment(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                        const PotentialSpec& spec, const Move& move);

/// [A - 2 m b] sum_{j in K_Delta} eta_Delta(Q_j)^2 - m b sum_{l in K_U} xi_{Delta^c}(Q_l)^2.
double stability_lower_bound(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                             const PotentialSpec& spec);
/// Single-cube form: [A - m b] eta(Q_k)^2 - b sum_{j in neighbors(k)} xi_{Q_k^c}(Q_j)^2.
double stability_lower_bound_cube(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const CubeIndex& k,
                                  const PotentialSpec& spec);

enum class GnzWeight {
    Phi,      // 2 s sum_y s_y phi(x, y)
    Literal,  // Phi plus the self term phi(x,x) s^2: the actual energy increment
};
double gnz_weight(double s, std::span<const double> x, const DiscreteMeasure& eta, const PotentialSpec& spec,
                  GnzWeight variant = GnzWeight::Phi);

struct BoundConstants {
    double C_Delta = 0.0;
    double C_phi = 0.0;
    double Upsilon_eps = 0.0;
    double B_eps = 0.0;
    double lambda0 = 0.0;
    double lambda0_zero_bc = 0.0;
    double eps_h = 0.0;
    double m_phi = 0.0;
    double vartheta = 0.0;  // R/g + sqrt(d)
    double lambda_min = 0.0;  // admissible lambda interval (lambda_min, lambda0]
    /// eps_h admissible at lambda0: B_eps < lambda0.
    bool eps_admissible = false;

    /// log C_lambda = Upsilon_eps / (1 - delta_fraction), with delta_fraction
    /// in (B_eps / lambda, 1); midpoint when not given. lambda below the
    /// admissible interval is bounded by its value at lambda0.
    double log_C_lambda(double lambda, std::optional<double> delta_fraction = {}) const;
    /// Right-hand side of the one-point Dobrushin estimate.
    double dobrushin_bound(double lambda, double neighbor_boundary_sq) const;
};

class BoundsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Default Hoelder parameter: half the largest admissible value at lambda0.
double default_eps_h(const PotentialSpec& spec, double theta);

BoundConstants bound_constants(const PotentialSpec& spec, double theta, double eps_h, const Window& window);

}  // namespace gammagibbs
