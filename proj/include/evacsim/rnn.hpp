#pragma once

#include <span>
#include <vector>

#include "evacsim/graph.hpp"

namespace evacsim {

// Random-neural-network decision unit held by a node: one neuron per
// neighbour. Each neuron j carries an excitatory input rate w_plus(j) and an
// inhibitory input rate w_minus(j); neurons laterally inhibit one another and
// the steady-state excitation q(j) in [0,1) ranks next-hop candidates.
// Rewards move input mass toward (or away from) the winning neuron while the
// total signal mass stays constant.
class RnnState {
public:
    // neighbours must be sorted ascending (the graph adjacency order).
    explicit RnnState(std::vector<NodeId> neighbours, double initial_weight = 0.5,
                      double alpha = 0.8);

    // Reinforcement step for the neuron of `winner` with reward > 0. Rewards
    // at or above the smoothed threshold excite the winner and inhibit the
    // rest; rewards below do the opposite. The injected mass is the reward
    // relative to the threshold, so uniformly rescaling all rewards does not
    // change the decision trajectory.
    void reinforce(NodeId winner, double reward);

    // Most excited neighbour; ties go to the smaller node id.
    NodeId most_excited() const;

    std::span<const NodeId> neighbours() const { return neighbours_; }
    double excitation(NodeId neighbour) const;
    std::span<const double> excitations() const { return q_; }
    double threshold() const { return threshold_; }
    bool trained() const { return trained_; }

    double weight_plus(NodeId neighbour) const { return w_plus_[index_of(neighbour)]; }
    double weight_minus(NodeId neighbour) const { return w_minus_[index_of(neighbour)]; }

private:
    std::size_t index_of(NodeId neighbour) const;
    void recompute_excitations();

    std::vector<NodeId> neighbours_;
    std::vector<double> w_plus_;
    std::vector<double> w_minus_;
    std::vector<double> q_;
    double threshold_ = 0.0;
    double alpha_;
    double total_mass_;  // invariant: sum(w_plus) + sum(w_minus)
    bool trained_ = false;
};

}  // namespace evacsim
