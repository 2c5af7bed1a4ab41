#pragma once

// Cube partition of R^d derived from the repulsion radius, windows built from
// it, and the neighbor / hull / tempered-norm machinery on top.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace gammagibbs {

class Rng;
class DiscreteMeasure;

/// Integer lattice coordinate k of the cube Q_k centered at g*k.
class CubeIndex {
public:
    CubeIndex() = default;
    explicit CubeIndex(std::vector<std::int64_t> k) : k_(std::move(k)) {}
    CubeIndex(std::initializer_list<std::int64_t> k) : k_(k) {}

    int dimension() const { return static_cast<int>(k_.size()); }
    std::int64_t operator[](int i) const { return k_[static_cast<std::size_t>(i)]; }
    std::int64_t& operator[](int i) { return k_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int64_t>& coords() const { return k_; }

    /// Euclidean norm |k| of the integer vector.
    double norm() const;

    CubeIndex operator+(const CubeIndex& other) const;
    CubeIndex operator-(const CubeIndex& other) const;

    auto operator<=>(const CubeIndex&) const = default;
    bool operator==(const CubeIndex&) const = default;

    std::string to_string() const;

private:
    std::vector<std::int64_t> k_;
};

struct CubeIndexHash {
    std::size_t operator()(const CubeIndex& k) const noexcept;
};

using CubeSet = std::unordered_set<CubeIndex, CubeIndexHash>;

/// Cube lattice with edge g = delta / sqrt(d). Every cube has diameter delta.
class CubeGrid {
public:
    CubeGrid(int dimension, double delta, double range);

    int dimension() const { return dim_; }
    double delta() const { return delta_; }
    double edge() const { return edge_; }
    double range() const { return range_; }
    double cube_volume() const;

    /// Lower corner of Q_k along axis i: g*k_i - g/2.
    double lower(const CubeIndex& k, int axis) const;
    double upper(const CubeIndex& k, int axis) const;
    CubeIndex origin() const { return CubeIndex(std::vector<std::int64_t>(static_cast<std::size_t>(dim_), 0)); }

    /// Infimum distance between Q_j and Q_k.
    double cube_distance(const CubeIndex& j, const CubeIndex& k) const;

    /// Offsets o != 0 such that Q_{k+o} lies within the interaction range of Q_k.
    /// Translation invariant, so computed once per grid.
    const std::vector<CubeIndex>& neighbor_offsets() const { return offsets_; }

    bool operator==(const CubeGrid& o) const {
        return dim_ == o.dim_ && delta_ == o.delta_ && range_ == o.range_;
    }

private:
    int dim_;
    double delta_;
    double edge_;
    double range_;
    std::vector<CubeIndex> offsets_;
};

/// Bounded region of R^d: either a finite union of grid cubes or a half-open box.
class Window {
public:
    Window() = default;

    static Window from_cubes(const CubeGrid& grid, std::vector<CubeIndex> cubes);
    static Window box(std::vector<double> lo, std::vector<double> hi);
    /// Cubes k with |k_i| <= half_width on every axis.
    static Window centered_block(const CubeGrid& grid, int half_width);

    bool is_cube_aligned() const { return grid_.has_value(); }
    bool empty() const;
    int dimension() const { return dim_; }
    double volume() const;
    bool contains(std::span<const double> x) const;

    /// Sorted cube list (cube-aligned windows only).
    const std::vector<CubeIndex>& cubes() const { return cubes_; }
    bool contains_cube(const CubeIndex& k) const { return cube_set_.contains(k); }
    const std::optional<CubeGrid>& grid() const { return grid_; }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }

    /// Whether every cube of this window is a cube of `other` (both cube-aligned).
    bool is_subset_of(const Window& other) const;

    /// Writes a uniformly distributed point of the window into `out`.
    void sample_point(Rng& rng, std::span<double> out) const;

    std::string describe() const;

private:
    int dim_ = 0;
    std::optional<CubeGrid> grid_;
    std::vector<CubeIndex> cubes_;
    CubeSet cube_set_;
    std::vector<double> lo_, hi_;
};

/// K_Delta together with the cubes covering the exterior shell U_Delta.
struct IndexHull {
    std::vector<CubeIndex> interior;  // K_Delta: cubes meeting the window
    std::vector<CubeIndex> shell;     // cubes covering U_Delta (closure of the shell)

    /// Membership in U_Delta = (union of shell cubes) minus the window.
    bool in_shell(std::span<const double> x, const CubeGrid& grid, const Window& window) const;
};

CubeIndex cube_index(std::span<const double> x, const CubeGrid& grid);

/// m^phi_delta = nu_d d^{d/2} (R/delta + 1)^d, nu_d the unit-ball volume.
double interaction_parameter(int dimension, double range, double delta);

/// Geometric neighbor set: all j != k whose cube lies within distance R of Q_k.
std::vector<CubeIndex> neighbor_indices(const CubeIndex& k, const CubeGrid& grid);

IndexHull index_hull(const Window& window, const CubeGrid& grid);

/// M_alpha(eta) = (sum_k eta(Q_k)^2 exp(-alpha |k|))^{1/2}.
double tempered_norm(const DiscreteMeasure& eta, double alpha, const CubeGrid& grid);

}  // namespace gammagibbs
