#pragma once

#include <utility>

#include "persuasion/common.hpp"
#include "persuasion/distribution.hpp"

namespace persuasion {

// One-shot persuasion game: finite states with a common prior, finite
// receiver actions, and a utility table per player (rows = states,
// columns = actions).
class PersuasionGame {
 public:
  PersuasionGame(Distribution prior, Table u_sender, Table u_receiver)
      : prior_(std::move(prior)), u_sender_(std::move(u_sender)), u_receiver_(std::move(u_receiver)) {
    if (u_sender_.rows != prior_.size() || !u_sender_.same_shape(u_receiver_))
      throw DomainViolation("PersuasionGame: utility shapes do not match prior/each other");
    if (u_sender_.cols <= 0) throw DomainViolation("PersuasionGame: need at least one action");
    if (!u_sender_.all_finite() || !u_receiver_.all_finite())
      throw DomainViolation("PersuasionGame: non-finite utility entry");
    sender_unit_range_ = true;
    for (double x : u_sender_.v)
      if (x < 0.0 || x > 1.0) sender_unit_range_ = false;
  }

  int n_states() const { return u_sender_.rows; }
  int n_actions() const { return u_sender_.cols; }
  const Distribution& prior() const { return prior_; }
  const Table& u_sender() const { return u_sender_; }
  const Table& u_receiver() const { return u_receiver_; }
  double sender_payoff(int state, int action) const { return u_sender_(state, action); }
  double receiver_payoff(int state, int action) const { return u_receiver_(state, action); }
  // True when every sender utility lies in [0, 1] (some bounds require this).
  bool sender_unit_range() const { return sender_unit_range_; }

 private:
  Distribution prior_;
  Table u_sender_;
  Table u_receiver_;
  bool sender_unit_range_ = false;
};

// Stackelberg analogue: a leader commits to a mixed strategy over its
// actions; a follower who observed samples of that strategy responds.
// Rows = leader actions, columns = follower actions.
class StackelbergGame {
 public:
  StackelbergGame(Table u_leader, Table u_follower)
      : u_leader_(std::move(u_leader)), u_follower_(std::move(u_follower)) {
    if (!u_leader_.same_shape(u_follower_))
      throw DomainViolation("StackelbergGame: utility shapes differ");
    if (u_leader_.rows <= 0 || u_leader_.cols <= 0)
      throw DomainViolation("StackelbergGame: empty action set");
    if (!u_leader_.all_finite() || !u_follower_.all_finite())
      throw DomainViolation("StackelbergGame: non-finite utility entry");
  }

  int n_leader_actions() const { return u_leader_.rows; }
  int n_follower_actions() const { return u_leader_.cols; }
  const Table& u_leader() const { return u_leader_; }
  const Table& u_follower() const { return u_follower_; }

 private:
  Table u_leader_;
  Table u_follower_;
};

}  // namespace persuasion
