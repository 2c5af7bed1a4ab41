#include "gammagibbs/measure.hpp"

#include <algorithm>
#include <numeric>

namespace gammagibbs {

DiscreteMeasure::DiscreteMeasure(int dimension)
    : dim_(dimension), cols_(static_cast<std::size_t>(dimension)) {
    if (dimension < 1) throw std::invalid_argument("measure dimension must be >= 1");
}

DiscreteMeasure::DiscreteMeasure(int dimension, Window window) : DiscreteMeasure(dimension) {
    if (!window.empty() && window.dimension() != dimension)
        throw std::invalid_argument("measure window has wrong dimension");
    window_ = std::move(window);
}

void DiscreteMeasure::add(std::span<const double> x, double mark) {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("atom position has wrong dimension");
    if (!(mark > 0.0)) throw std::invalid_argument("atom mark must be positive");
    for (int a = 0; a < dim_; ++a) cols_[static_cast<std::size_t>(a)].push_back(x[static_cast<std::size_t>(a)]);
    marks_.push_back(mark);
}

void DiscreteMeasure::swap_remove(std::size_t i) {
    const std::size_t last = marks_.size() - 1;
    for (auto& c : cols_) {
        c[i] = c[last];
        c.pop_back();
    }
    marks_[i] = marks_[last];
    marks_.pop_back();
}

void DiscreteMeasure::reserve(std::size_t n) {
    for (auto& c : cols_) c.reserve(n);
    marks_.reserve(n);
}

void DiscreteMeasure::clear() {
    for (auto& c : cols_) c.clear();
    marks_.clear();
}

void DiscreteMeasure::position(std::size_t i, std::span<double> out) const {
    for (int a = 0; a < dim_; ++a) out[static_cast<std::size_t>(a)] = cols_[static_cast<std::size_t>(a)][i];
}

std::vector<double> DiscreteMeasure::position(std::size_t i) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    position(i, x);
    return x;
}

double DiscreteMeasure::total_mass() const {
    double m = 0.0;
    for (double s : marks_) m += s;
    return m;
}

double DiscreteMeasure::mass_in(const Window& w) const {
    return mass_where([&](std::span<const double> x) { return w.contains(x); });
}

double DiscreteMeasure::mass_in_cube(const CubeIndex& k, const CubeGrid& grid) const {
    return mass_where([&](std::span<const double> x) { return cube_index(x, grid) == k; });
}

namespace {

std::vector<std::size_t> lexicographic_order(const DiscreteMeasure& m) {
    std::vector<std::size_t> idx(m.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        for (int ax = 0; ax < m.dimension(); ++ax) {
            const double xa = m.coord(a, ax), xb = m.coord(b, ax);
            if (xa < xb) return true;
            if (xb < xa) return false;
        }
        return m.mark(a) < m.mark(b);
    });
    return idx;
}

}  // namespace

void DiscreteMeasure::canonicalize() {
    const auto idx = lexicographic_order(*this);
    for (auto& c : cols_) {
        std::vector<double> sorted(c.size());
        for (std::size_t i = 0; i < idx.size(); ++i) sorted[i] = c[idx[i]];
        c = std::move(sorted);
    }
    std::vector<double> sorted(marks_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) sorted[i] = marks_[idx[i]];
    marks_ = std::move(sorted);
}

bool DiscreteMeasure::has_duplicate_positions() const {
    const auto idx = lexicographic_order(*this);
    for (std::size_t i = 1; i < idx.size(); ++i) {
        bool same = true;
        for (int ax = 0; ax < dim_ && same; ++ax) same = coord(idx[i], ax) == coord(idx[i - 1], ax);
        if (same) return true;
    }
    return false;
}

bool DiscreteMeasure::operator==(const DiscreteMeasure& o) const {
    return dim_ == o.dim_ && cols_ == o.cols_ && marks_ == o.marks_;
}

MarkedConfiguration to_marked(const DiscreteMeasure& eta) {
    DiscreteMeasure sorted = eta;
    sorted.canonicalize();
    MarkedConfiguration gamma;
    gamma.dimension = eta.dimension();
    gamma.points.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) gamma.points.push_back({sorted.mark(i), sorted.position(i)});
    return gamma;
}

DiscreteMeasure from_marked(const MarkedConfiguration& gamma) {
    std::vector<const MarkedPoint*> pts;
    pts.reserve(gamma.points.size());
    for (const auto& p : gamma.points) {
        if (static_cast<int>(p.position.size()) != gamma.dimension)
            throw std::invalid_argument("marked point has wrong dimension");
        pts.push_back(&p);
    }
    std::sort(pts.begin(), pts.end(), [](const MarkedPoint* a, const MarkedPoint* b) {
        if (a->position != b->position) return a->position < b->position;
        return a->mark < b->mark;
    });
    DiscreteMeasure eta(gamma.dimension);
    eta.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && pts[i]->position == pts[i - 1]->position) {
            if (pts[i]->mark != pts[i - 1]->mark)
                throw PinpointingError("two marks at the same position violate the pinpointing property");
            continue;
        }
        eta.add(pts[i]->position, pts[i]->mark);
    }
    return eta;
}

}  // namespace gammagibbs
