#include "evacsim/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace evacsim {

namespace {
constexpr double kFiringRate = 1.0;
constexpr double kMaxExcitation = 1.0 - 1e-9;
constexpr double kFixedPointTol = 1e-6;
constexpr int kFixedPointMaxIter = 100;
}  // namespace

RnnState::RnnState(std::vector<NodeId> neighbours, double initial_weight, double alpha)
    : neighbours_(std::move(neighbours)), alpha_(alpha) {
    if (neighbours_.empty()) throw std::invalid_argument("RnnState needs at least one neighbour");
    if (!std::is_sorted(neighbours_.begin(), neighbours_.end()))
        throw std::invalid_argument("RnnState neighbours must be sorted");
    w_plus_.assign(neighbours_.size(), initial_weight);
    w_minus_.assign(neighbours_.size(), initial_weight);
    q_.assign(neighbours_.size(), 0.0);
    total_mass_ = 2.0 * initial_weight * static_cast<double>(neighbours_.size());
    recompute_excitations();
}

std::size_t RnnState::index_of(NodeId neighbour) const {
    const auto it = std::lower_bound(neighbours_.begin(), neighbours_.end(), neighbour);
    if (it == neighbours_.end() || *it != neighbour)
        throw std::invalid_argument("RnnState: node " + std::to_string(neighbour) +
                                    " is not a neighbour");
    return static_cast<std::size_t>(it - neighbours_.begin());
}

double RnnState::excitation(NodeId neighbour) const { return q_[index_of(neighbour)]; }

NodeId RnnState::most_excited() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q_.size(); ++i) {
        if (q_[i] > q_[best]) best = i;  // strict: ties keep the smaller id
    }
    return neighbours_[best];
}

void RnnState::reinforce(NodeId winner, double reward) {
    if (!(reward > 0.0)) throw std::invalid_argument("RnnState: reward must be > 0");
    const std::size_t w = index_of(winner);
    const std::size_t n = neighbours_.size();

    threshold_ = alpha_ * threshold_ + (1.0 - alpha_) * reward;
    const bool rewarding = reward >= threshold_;

    // Mass is injected relative to the running threshold, so scaling every
    // reward by a constant scales the threshold identically and leaves the
    // weight (and argmax) trajectory untouched.
    const double boost = reward / std::max(threshold_, 1e-12);

    if (n == 1) {
        // Nothing to discriminate; track the threshold and winner mass only.
        if (rewarding)
            w_plus_[0] += boost;
        else
            w_minus_[0] += boost;
    } else {
        const double share = boost / static_cast<double>(n - 1);
        if (rewarding) {
            w_plus_[w] += boost;
            for (std::size_t j = 0; j < n; ++j)
                if (j != w) w_minus_[j] += share;
        } else {
            w_minus_[w] += boost;
            for (std::size_t j = 0; j < n; ++j)
                if (j != w) w_plus_[j] += share;
        }
    }

    // Renormalize so the total signal mass is conserved.
    const double mass = std::accumulate(w_plus_.begin(), w_plus_.end(), 0.0) +
                        std::accumulate(w_minus_.begin(), w_minus_.end(), 0.0);
    const double scale = total_mass_ / mass;
    for (double& x : w_plus_) x *= scale;
    for (double& x : w_minus_) x *= scale;

    trained_ = true;
    recompute_excitations();
}

void RnnState::recompute_excitations() {
    const std::size_t n = neighbours_.size();
    if (n == 1) {
        q_[0] = std::clamp(w_plus_[0] / (kFiringRate + w_minus_[0]), 0.0, kMaxExcitation);
        return;
    }
    // Fixed point of q(j) = w+(j) / (r + w-(j) + mean of the other neurons'
    // excitation), i.e. mutual lateral inhibition at unit firing rate.
    std::vector<double> cur(n, 0.5);
    std::vector<double> next(n, 0.0);
    const double inv_others = 1.0 / static_cast<double>(n - 1);
    for (int iter = 0; iter < kFixedPointMaxIter; ++iter) {
        const double sum_q = std::accumulate(cur.begin(), cur.end(), 0.0);
        double max_delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double lateral = (sum_q - cur[j]) * inv_others;
            double qj = w_plus_[j] / (kFiringRate + w_minus_[j] + lateral);
            qj = std::clamp(qj, 0.0, kMaxExcitation);
            max_delta = std::max(max_delta, std::abs(qj - cur[j]));
            next[j] = qj;
        }
        cur.swap(next);
        if (max_delta < kFixedPointTol) break;
    }
    q_ = cur;
}

}  // namespace evacsim
