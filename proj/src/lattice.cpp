#include "gammagibbs/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gammagibbs/measure.hpp"
#include "gammagibbs/rng.hpp"

namespace gammagibbs {

double CubeIndex::norm() const {
    double s = 0.0;
    for (auto v : k_) s += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(s);
}

CubeIndex CubeIndex::operator+(const CubeIndex& o) const {
    CubeIndex r = *this;
    for (std::size_t i = 0; i < k_.size(); ++i) r.k_[i] += o.k_[i];
    return r;
}

CubeIndex CubeIndex::operator-(const CubeIndex& o) const {
    CubeIndex r = *this;
    for (std::size_t i = 0; i < k_.size(); ++i) r.k_[i] -= o.k_[i];
    return r;
}

std::string CubeIndex::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < k_.size(); ++i) os << (i ? "," : "") << k_[i];
    os << ')';
    return os.str();
}

std::size_t CubeIndexHash::operator()(const CubeIndex& k) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : k.coords()) {
        h ^= std::hash<std::int64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

CubeGrid::CubeGrid(int dimension, double delta, double range)
    : dim_(dimension), delta_(delta), edge_(0.0), range_(range) {
    if (dimension < 1) throw std::invalid_argument("grid dimension must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("grid delta must be positive");
    if (!(range > 0.0) || !std::isfinite(range)) throw std::invalid_argument("grid range must be positive");
    edge_ = delta / std::sqrt(static_cast<double>(dimension));

    // |o_i| <= R/g + 1 bounds every candidate; boundary cases are kept with a
    // small relative slack since a superset of the true neighbor set is sound.
    const auto reach = static_cast<std::int64_t>(std::floor(range_ / edge_)) + 1;
    std::vector<std::int64_t> o(static_cast<std::size_t>(dim_), -reach);
    const CubeIndex zero = origin();
    for (;;) {
        CubeIndex c(o);
        if (c != zero && cube_distance(c, zero) <= range_ * (1.0 + 1e-12)) offsets_.push_back(c);
        int axis = 0;
        while (axis < dim_) {
            auto& v = o[static_cast<std::size_t>(axis)];
            if (v < reach) {
                ++v;
                break;
            }
            v = -reach;
            ++axis;
        }
        if (axis == dim_) break;
    }
    std::sort(offsets_.begin(), offsets_.end());
}

double CubeGrid::cube_volume() const { return std::pow(edge_, dim_); }

double CubeGrid::lower(const CubeIndex& k, int axis) const {
    return edge_ * static_cast<double>(k[axis]) - 0.5 * edge_;
}

double CubeGrid::upper(const CubeIndex& k, int axis) const {
    return edge_ * static_cast<double>(k[axis]) + 0.5 * edge_;
}

double CubeGrid::cube_distance(const CubeIndex& j, const CubeIndex& k) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const auto gap = std::max<std::int64_t>(std::llabs(j[i] - k[i]) - 1, 0);
        s += static_cast<double>(gap * gap);
    }
    return edge_ * std::sqrt(s);
}

CubeIndex cube_index(std::span<const double> x, const CubeGrid& grid) {
    if (static_cast<int>(x.size()) != grid.dimension()) throw std::invalid_argument("cube_index: dimension mismatch");
    std::vector<std::int64_t> k(x.size());
    const double g = grid.edge();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw std::invalid_argument("cube_index: non-finite coordinate");
        k[i] = static_cast<std::int64_t>(std::floor((x[i] + 0.5 * g) / g));
    }
    return CubeIndex(std::move(k));
}

double interaction_parameter(int dimension, double range, double delta) {
    if (dimension < 1 || !(range > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("interaction_parameter: requires d >= 1, R > 0, delta > 0");
    const double d = dimension;
    const double unit_ball = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    return unit_ball * std::pow(d, d / 2.0) * std::pow(range / delta + 1.0, d);
}

std::vector<CubeIndex> neighbor_indices(const CubeIndex& k, const CubeGrid& grid) {
    std::vector<CubeIndex> out;
    out.reserve(grid.neighbor_offsets().size());
    for (const auto& o : grid.neighbor_offsets()) out.push_back(k + o);
    return out;
}

// ---------------------------------------------------------------------------

Window Window::from_cubes(const CubeGrid& grid, std::vector<CubeIndex> cubes) {
    Window w;
    w.dim_ = grid.dimension();
    w.grid_ = grid;
    for (const auto& c : cubes)
        if (c.dimension() != w.dim_) throw std::invalid_argument("window cube has wrong dimension");
    std::sort(cubes.begin(), cubes.end());
    cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
    w.cubes_ = std::move(cubes);
    w.cube_set_ = CubeSet(w.cubes_.begin(), w.cubes_.end());
    return w;
}

Window Window::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("box bounds must have equal, nonzero length");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || hi[i] < lo[i])
            throw std::invalid_argument("box bounds must be finite with lo <= hi");
    Window w;
    w.dim_ = static_cast<int>(lo.size());
    w.lo_ = std::move(lo);
    w.hi_ = std::move(hi);
    return w;
}

Window Window::centered_block(const CubeGrid& grid, int half_width) {
    std::vector<CubeIndex> cubes;
    const int d = grid.dimension();
    std::vector<std::int64_t> k(static_cast<std::size_t>(d), -half_width);
    for (;;) {
        cubes.emplace_back(k);
        int axis = 0;
        while (axis < d) {
            auto& v = k[static_cast<std::size_t>(axis)];
            if (v < half_width) {
                ++v;
                break;
            }
            v = -half_width;
            ++axis;
        }
        if (axis == d) break;
    }
    return from_cubes(grid, std::move(cubes));
}

bool Window::empty() const {
    if (grid_) return cubes_.empty();
    if (lo_.empty()) return true;
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (!(hi_[i] > lo_[i])) return true;
    return false;
}

double Window::volume() const {
    if (grid_) return static_cast<double>(cubes_.size()) * grid_->cube_volume();
    if (lo_.empty()) return 0.0;
    double v = 1.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) v *= (hi_[i] - lo_[i]);
    return v;
}

bool Window::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_ || dim_ == 0) return false;
    if (grid_) return cube_set_.contains(cube_index(x, *grid_));
    for (std::size_t i = 0; i < lo_.size(); ++i)
        if (!(x[i] >= lo_[i] && x[i] < hi_[i])) return false;
    return true;
}

bool Window::is_subset_of(const Window& other) const {
    if (!grid_ || !other.grid_) throw std::invalid_argument("is_subset_of requires cube-aligned windows");
    if (!(*grid_ == *other.grid_)) return false;
    return std::all_of(cubes_.begin(), cubes_.end(), [&](const CubeIndex& k) { return other.contains_cube(k); });
}

void Window::sample_point(Rng& rng, std::span<double> out) const {
    if (empty()) throw std::logic_error("cannot sample a point from an empty window");
    if (grid_) {
        const auto& k = cubes_[rng.index(cubes_.size())];
        for (int i = 0; i < dim_; ++i)
            out[static_cast<std::size_t>(i)] = rng.uniform(grid_->lower(k, i), grid_->upper(k, i));
        return;
    }
    for (std::size_t i = 0; i < lo_.size(); ++i) out[i] = rng.uniform(lo_[i], hi_[i]);
}

std::string Window::describe() const {
    std::ostringstream os;
    if (grid_) {
        os << "cubes[";
        for (std::size_t i = 0; i < cubes_.size(); ++i) os << (i ? " " : "") << cubes_[i].to_string();
        os << "]";
    } else {
        os << "box[";
        for (std::size_t i = 0; i < lo_.size(); ++i) os << (i ? " x " : "") << '[' << lo_[i] << ',' << hi_[i] << ')';
        os << "]";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

IndexHull index_hull(const Window& window, const CubeGrid& grid) {
    IndexHull hull;
    if (window.empty()) return hull;
    if (window.dimension() != grid.dimension()) throw std::invalid_argument("index_hull: dimension mismatch");

    const int d = grid.dimension();
    // Cubes that are completely inside the window never belong to the shell.
    CubeSet full_inside;
    if (window.is_cube_aligned() && *window.grid() == grid) {
        hull.interior = window.cubes();
        full_inside.insert(hull.interior.begin(), hull.interior.end());
    } else {
        const double g = grid.edge();
        std::vector<std::int64_t> kmin(static_cast<std::size_t>(d)), kmax(static_cast<std::size_t>(d));
        if (window.is_cube_aligned()) {
            // Cube-aligned on a different grid: use its bounding box.
            const auto& og = *window.grid();
            std::vector<double> lo(static_cast<std::size_t>(d), INFINITY), hi(static_cast<std::size_t>(d), -INFINITY);
            for (const auto& c : window.cubes())
                for (int i = 0; i < d; ++i) {
                    lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], og.lower(c, i));
                    hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], og.upper(c, i));
                }
            return index_hull(Window::box(lo, hi), grid);
        }
        for (int i = 0; i < d; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            kmin[ui] = static_cast<std::int64_t>(std::floor((window.lo()[ui] + 0.5 * g) / g));
            // largest k with g*k - g/2 < hi
            kmax[ui] = static_cast<std::int64_t>(std::ceil(window.hi()[ui] / g + 0.5)) - 1;
        }
        std::vector<std::int64_t> k = kmin;
        for (;;) {
            CubeIndex c(k);
            hull.interior.push_back(c);
            bool inside = true;
            for (int i = 0; i < d; ++i)
                if (grid.lower(c, i) < window.lo()[static_cast<std::size_t>(i)] ||
                    grid.upper(c, i) > window.hi()[static_cast<std::size_t>(i)])
                    inside = false;
            if (inside) full_inside.insert(c);
            int axis = 0;
            while (axis < d) {
                auto ui = static_cast<std::size_t>(axis);
                if (k[ui] < kmax[ui]) {
                    ++k[ui];
                    break;
                }
                k[ui] = kmin[ui];
                ++axis;
            }
            if (axis == d) break;
        }
    }

    CubeSet shell;
    for (const auto& k : hull.interior) {
        if (!full_inside.contains(k)) shell.insert(k);
        for (const auto& o : grid.neighbor_offsets()) {
            CubeIndex j = k + o;
            if (!full_inside.contains(j)) shell.insert(j);
        }
    }
    hull.shell.assign(shell.begin(), shell.end());
    std::sort(hull.shell.begin(), hull.shell.end());
    return hull;
}

bool IndexHull::in_shell(std::span<const double> x, const CubeGrid& grid, const Window& window) const {
    if (window.contains(x)) return false;
    return std::binary_search(shell.begin(), shell.end(), cube_index(x, grid));
}

double tempered_norm(const DiscreteMeasure& eta, double alpha, const CubeGrid& grid) {
    if (!(alpha > 0.0)) throw std::invalid_argument("tempered_norm: alpha must be positive");
    std::unordered_map<CubeIndex, double, CubeIndexHash> mass;
    std::vector<double> x(static_cast<std::size_t>(eta.dimension()));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.position(i, x);
        mass[cube_index(x, grid)] += eta.mark(i);
    }
    std::vector<std::pair<CubeIndex, double>> sorted(mass.begin(), mass.end());
    std::sort(sorted.begin(), sorted.end());
    double s = 0.0;
    for (const auto& [k, m] : sorted) s += m * m * std::exp(-alpha * k.norm());
    return std::sqrt(s);
}

}  // namespace gammagibbs
