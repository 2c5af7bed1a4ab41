#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "gammagibbs/lattice.hpp"

namespace gammagibbs {

/// Finite discrete measure eta = sum_i s_i delta_{x_i} on a window.
///
/// Positions are stored column-wise (one contiguous array per axis) so the
/// pair kernels can stream them without gathers.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    explicit DiscreteMeasure(int dimension);
    DiscreteMeasure(int dimension, Window window);

    int dimension() const { return dim_; }
    std::size_t size() const { return marks_.size(); }
    bool empty() const { return marks_.empty(); }

    const Window& window() const { return window_; }
    void set_window(Window w) { window_ = std::move(w); }

    void add(std::span<const double> x, double mark);
    /// Removes atom i by moving the last atom into its slot.
    void swap_remove(std::size_t i);
    void set_mark(std::size_t i, double mark) { marks_[i] = mark; }
    void reserve(std::size_t n);
    void clear();

    double mark(std::size_t i) const { return marks_[i]; }
    double coord(std::size_t i, int axis) const { return cols_[static_cast<std::size_t>(axis)][i]; }
    void position(std::size_t i, std::span<double> out) const;
    std::vector<double> position(std::size_t i) const;

    std::span<const double> marks() const { return marks_; }
    std::span<const double> column(int axis) const { return cols_[static_cast<std::size_t>(axis)]; }

    double total_mass() const;
    /// eta(B) for B given as a point predicate.
    template <class Pred>
    double mass_where(Pred&& in) const {
        double m = 0.0;
        std::vector<double> x(static_cast<std::size_t>(dim_));
        for (std::size_t i = 0; i < size(); ++i) {
            position(i, x);
            if (in(std::span<const double>(x))) m += marks_[i];
        }
        return m;
    }
    double mass_in(const Window& w) const;
    double mass_in_cube(const CubeIndex& k, const CubeGrid& grid) const;

    /// Restriction eta_B to atoms whose position satisfies the predicate.
    template <class Pred>
    DiscreteMeasure restrict_where(Pred&& in) const {
        DiscreteMeasure out(dim_);
        std::vector<double> x(static_cast<std::size_t>(dim_));
        for (std::size_t i = 0; i < size(); ++i) {
            position(i, x);
            if (in(std::span<const double>(x))) out.add(x, marks_[i]);
        }
        return out;
    }

    /// Sorts atoms lexicographically by position.
    void canonicalize();
    bool has_duplicate_positions() const;

    /// Atom-wise equality in storage order, bit-exact.
    bool operator==(const DiscreteMeasure& o) const;

private:
    int dim_ = 0;
    Window window_;
    std::vector<std::vector<double>> cols_;
    std::vector<double> marks_;
};

/// Marked configuration gamma = {(s_i, x_i)}: the Poisson-side view.
struct MarkedPoint {
    double mark;
    std::vector<double> position;
    bool operator==(const MarkedPoint&) const = default;
};

struct MarkedConfiguration {
    int dimension = 0;
    std::vector<MarkedPoint> points;
    bool operator==(const MarkedConfiguration&) const = default;
};

class PinpointingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// T^{-1}: discrete measure to marked configuration, canonical order.
MarkedConfiguration to_marked(const DiscreteMeasure& eta);
/// T: marked configuration to discrete measure. Repeated positions with equal
/// marks collapse to one atom; unequal marks violate pinpointing and throw.
DiscreteMeasure from_marked(const MarkedConfiguration& gamma);

}  // namespace gammagibbs
