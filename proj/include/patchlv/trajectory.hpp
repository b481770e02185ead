#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "patchlv/model.hpp"

namespace patchlv {

template <std::size_t N>
struct TrajectoryNode {
    double t = 0.0;
    std::array<double, N> y{};
    std::array<double, N> dy{};  // vector field at (t, y), stored for dense output
};

/// Immutable record of an integration: nodes at strictly increasing times,
/// each carrying the state and its derivative. Between nodes, sample()
/// evaluates the cubic Hermite interpolant, which reproduces the stored
/// values exactly at the nodes and has O(h^4) error in between.
template <std::size_t N>
class Trajectory {
  public:
    using Vec = std::array<double, N>;

    explicit Trajectory(std::vector<TrajectoryNode<N>> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.empty()) throw std::invalid_argument("Trajectory: needs at least one node");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (!(nodes_[i - 1].t < nodes_[i].t))
                throw std::invalid_argument("Trajectory: node times must be strictly increasing");
        }
    }

    double t_begin() const { return nodes_.front().t; }
    double t_end() const { return nodes_.back().t; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const TrajectoryNode<N>> nodes() const { return {nodes_.data(), nodes_.size()}; }

    /// Hint for repeated sampling at (mostly) nondecreasing times; avoids a
    /// fresh binary search per call. A default-constructed cursor is valid.
    struct Cursor {
        std::size_t segment = 0;
    };

    Vec sample(double t) const {
        Cursor cursor;
        return sample(t, cursor);
    }

    Vec sample(double t, Cursor& cursor) const {
        if (t < t_begin() || t > t_end())
            throw std::out_of_range("Trajectory::sample: t outside [t_begin, t_end]");
        if (nodes_.size() == 1) return nodes_.front().y;

        std::size_t seg = std::min(cursor.segment, nodes_.size() - 2);
        if (t < nodes_[seg].t) {
            // Cursor is ahead of t: fall back to a binary search.
            const auto it = std::upper_bound(
                nodes_.begin(), nodes_.end(), t,
                [](double value, const TrajectoryNode<N>& n) { return value < n.t; });
            seg = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
            seg = (seg == 0) ? 0 : seg - 1;
            seg = std::min(seg, nodes_.size() - 2);
        }
        while (seg + 2 < nodes_.size() && t >= nodes_[seg + 1].t) ++seg;
        cursor.segment = seg;

        const TrajectoryNode<N>& a = nodes_[seg];
        const TrajectoryNode<N>& b = nodes_[seg + 1];
        if (t == a.t) return a.y;
        if (t == b.t) return b.y;
        return hermite(a, b, t);
    }

  private:
    static Vec hermite(const TrajectoryNode<N>& a, const TrajectoryNode<N>& b, double t) {
        const double h = b.t - a.t;
        const double s = (t - a.t) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        const double h10 = s3 - 2.0 * s2 + s;
        const double h01 = -2.0 * s3 + 3.0 * s2;
        const double h11 = s3 - s2;
        Vec out{};
        for (std::size_t i = 0; i < N; ++i)
            out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
        return out;
    }

    std::vector<TrajectoryNode<N>> nodes_;
};

inline State sample(const Trajectory<4>& traj, double t) {
    return state_from_array(traj.sample(t));
}

}  // namespace patchlv
