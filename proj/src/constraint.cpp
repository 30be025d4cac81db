#include "firefit/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace firefit {

Perimeter Perimeter::at_time(std::span<const std::array<double, 2>> xy, double time) {
    Perimeter p;
    p.points.reserve(xy.size());
    for (const auto& q : xy) p.points.push_back({q[0], q[1], time});
    return p;
}

Perimeter Perimeter::ignition(double x, double y, double time) {
    return Perimeter{{{x, y, time}}};
}

TrianglePoint locate_point(const Grid& grid, double px, double py) {
    if (!std::isfinite(px) || !std::isfinite(py) || !grid.contains(px, py)) {
        std::ostringstream msg;
        msg << "point (" << px << ", " << py << ") is outside the grid";
        throw OutOfDomain(msg.str());
    }
    const double u = (px - grid.x0) / grid.dx;
    const double v = (py - grid.y0) / grid.dy;
    auto cell = [](double w, std::size_t n) {
        const double c = std::ceil(w) - 1.0;
        return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n - 2)));
    };
    const std::size_t ci = cell(u, grid.nx);
    const std::size_t cj = cell(v, grid.ny);
    const double s = std::clamp(u - static_cast<double>(ci), 0.0, 1.0);
    const double t = std::clamp(v - static_cast<double>(cj), 0.0, 1.0);
    const std::size_t c = cj * (grid.nx - 1) + ci;
    const std::size_t n00 = grid.index(ci, cj);
    const std::size_t n10 = grid.index(ci + 1, cj);
    const std::size_t n11 = grid.index(ci + 1, cj + 1);
    const std::size_t n01 = grid.index(ci, cj + 1);
    TrianglePoint out;
    if (s >= t) {
        out.triangle = 2 * c;
        out.nodes = {n00, n10, n11};
        out.weights = {1.0 - s, s - t, t};
    } else {
        out.triangle = 2 * c + 1;
        out.nodes = {n00, n11, n01};
        out.weights = {1.0 - t, s, t - s};
    }
    return out;
}

ConstraintSystem::ConstraintSystem(const Grid& grid, std::vector<std::vector<Entry>> rows,
                                   std::vector<double> rhs, std::vector<std::size_t> counts)
    : grid_(grid), rows_(std::move(rows)), rhs_(std::move(rhs)), counts_(std::move(counts)) {
    if (rows_.size() != rhs_.size()) throw ShapeMismatch("constraint rows and rhs differ in size");
    if (counts_.empty()) counts_.assign(rows_.size(), 1);
    if (counts_.size() != rows_.size()) throw ShapeMismatch("constraint counts size mismatch");
    for (auto& r : rows_) {
        std::stable_sort(r.begin(), r.end(),
                         [](const Entry& a, const Entry& b) { return a.node < b.node; });
        std::vector<Entry> merged;
        for (const auto& e : r) {
            if (!merged.empty() && merged.back().node == e.node) {
                merged.back().coef += e.coef;
            } else {
                merged.push_back(e);
            }
        }
        r = std::move(merged);
    }
    std::vector<std::size_t> per_node(grid_.size() + 1, 0);
    for (const auto& r : rows_) {
        if (r.empty()) throw RankDeficient("constraint row has no entries");
        for (const auto& e : r) {
            if (e.node >= grid_.size()) throw OutOfDomain("constraint entry outside the grid");
            ++per_node[e.node + 1];
        }
    }
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (per_node[k + 1]) support_.push_back(k);
        per_node[k + 1] += per_node[k];
    }
    node_row_ptr_ = per_node;
    node_rows_.resize(per_node.back());
    std::vector<std::size_t> fill(per_node.begin(), per_node.end() - 1);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (const auto& e : rows_[r]) node_rows_[fill[e.node]++] = r;
    }
    factorize();
}

std::span<const std::size_t> ConstraintSystem::rows_of(std::size_t k) const {
    return std::span<const std::size_t>(node_rows_).subspan(
        node_row_ptr_[k], node_row_ptr_[k + 1] - node_row_ptr_[k]);
}

void ConstraintSystem::factorize() {
    const std::size_t m = rows_.size();
    // Gram matrix from the node-row adjacency; only rows sharing a node couple.
    std::vector<double> G(m * m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& e : rows_[r]) {
            for (std::size_t q : rows_of(e.node)) {
                if (q < r) continue;
                for (const auto& f : rows_[q]) {
                    if (f.node == e.node) G[r * m + q] += e.coef * f.coef;
                }
            }
        }
    }
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t q = 0; q < r; ++q) G[r * m + q] = G[q * m + r];

    chol_.assign(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double d = G[j * m + j];
        for (std::size_t k = 0; k < j; ++k) d -= chol_[j * m + k] * chol_[j * m + k];
        if (!(d > kGramPivotTolerance * G[j * m + j])) {
            throw RankDeficient("constraint rows are linearly dependent (row " +
                                std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(d);
        chol_[j * m + j] = ljj;
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = G[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= chol_[i * m + k] * chol_[j * m + k];
            chol_[i * m + j] = s / ljj;
        }
    }
}

std::vector<double> ConstraintSystem::apply(std::span<const double> T) const {
    if (T.size() != grid_.size()) throw ShapeMismatch("field size does not match constraints");
    std::vector<double> out(rows_.size(), 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        double s = 0.0;
        for (const auto& e : rows_[r]) s += e.coef * T[e.node];
        out[r] = s;
    }
    return out;
}

void ConstraintSystem::apply_transpose_add(std::span<const double> y, std::span<double> out,
                                           double scale) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        if (y[r] == 0.0) continue;
        for (const auto& e : rows_[r]) out[e.node] += scale * e.coef * y[r];
    }
}

void ConstraintSystem::solve_gram(std::span<double> b) const {
    const std::size_t m = rows_.size();
    for (std::size_t i = 0; i < m; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol_[i * m + k] * b[k];
        b[i] = s / chol_[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= chol_[k * m + i] * b[k];
        b[i] = s / chol_[i * m + i];
    }
}

double ConstraintSystem::relative_violation(std::span<const double> T) const {
    const auto HT = apply(T);
    double worst = 0.0, scale = 1.0;
    for (std::size_t r = 0; r < rhs_.size(); ++r) {
        worst = std::max(worst, std::abs(HT[r] - rhs_[r]));
        scale = std::max(scale, std::abs(rhs_[r]));
    }
    return worst / scale;
}

ScalarField ConstraintSystem::feasible_point() const {
    ScalarField u(grid_);
    std::vector<double> y = rhs_;
    solve_gram(y);
    apply_transpose_add(y, u.values());
    // One refinement pass pulls H u0 - g down to rounding level.
    auto r = apply(u.values());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs_[i] - r[i];
    solve_gram(r);
    apply_transpose_add(r, u.values());
    return u;
}

void ConstraintSystem::project_nullspace_inplace(std::span<double> v) const {
    for (int pass = 0; pass < 2; ++pass) {
        auto y = apply(v);
        solve_gram(y);
        apply_transpose_add(y, v, -1.0);
    }
}

ScalarField ConstraintSystem::project_nullspace(const ScalarField& v) const {
    require_same_grid(grid_, v.grid(), "project_nullspace");
    ScalarField out = v;
    project_nullspace_inplace(out.values());
    return out;
}

std::vector<std::vector<double>> ConstraintSystem::dense() const {
    std::vector<std::vector<double>> D(rows_.size(), std::vector<double>(grid_.size(), 0.0));
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (const auto& e : rows_[r]) D[r][e.node] += e.coef;
    return D;
}

ConstraintSystem build_constraints(const Grid& grid, std::span<const Perimeter> perimeters) {
    using Key = std::pair<std::size_t, std::size_t>;  // (perimeter, triangle)
    std::map<Key, std::vector<PerimeterPoint>> groups;
    for (std::size_t p = 0; p < perimeters.size(); ++p) {
        for (const auto& q : perimeters[p].points) {
            if (!std::isfinite(q.time)) throw InvalidArgument("perimeter time is not finite");
            TrianglePoint tp;
            try {
                tp = locate_point(grid, q.x, q.y);
            } catch (const OutOfDomain&) {
                std::ostringstream msg;
                msg << "perimeter " << p << " point (" << q.x << ", " << q.y
                    << ") is outside the grid";
                throw OutOfDomain(msg.str());
            }
            groups[{p, tp.triangle}].push_back(q);
        }
    }
    std::vector<std::vector<ConstraintSystem::Entry>> rows;
    std::vector<double> rhs;
    std::vector<std::size_t> counts;
    for (auto& [key, pts] : groups) {
        // Fixed summation order makes assembly independent of input order.
        std::sort(pts.begin(), pts.end(), [](const PerimeterPoint& a, const PerimeterPoint& b) {
            return std::tie(a.x, a.y, a.time) < std::tie(b.x, b.y, b.time);
        });
        std::map<std::size_t, double> acc;
        double g = 0.0;
        for (const auto& q : pts) {
            const auto tp = locate_point(grid, q.x, q.y);
            for (int n = 0; n < 3; ++n) {
                if (tp.weights[n] > 0.0) acc[tp.nodes[n]] += tp.weights[n];
            }
            g += q.time;
        }
        std::vector<ConstraintSystem::Entry> row;
        for (const auto& [node, coef] : acc) row.push_back({node, coef});
        rows.push_back(std::move(row));
        rhs.push_back(g);
        counts.push_back(pts.size());
    }
    if (rows.empty()) throw InvalidArgument("at least one perimeter point is required");
    return ConstraintSystem(grid, std::move(rows), std::move(rhs), std::move(counts));
}

}  // namespace firefit
