#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bsl/model.hpp"

namespace bsl {

/// Decision table g^t in trajectory form: the law of an agent's trajectory
/// sigma^t given its signal and the observed neighbor trajectories through
/// round t-1. Deterministic rules store one code per input; stochastic rules
/// store a sparse row per input.
///
/// Input index layout: x + |X| * sum_m code_m * M^m, with M = |B|^t the number
/// of observable trajectories through t-1 and neighbors in canonical order.
class TrajectoryTable {
 public:
  struct Outcome {
    Code code;
    double prob;
  };

  TrajectoryTable() = default;
  TrajectoryTable(int horizon, int num_neighbors, int num_signals, int obs_alphabet,
                  int action_alphabet);

  int horizon() const { return horizon_; }
  int num_neighbors() const { return num_neighbors_; }
  int num_signals() const { return num_signals_; }
  int obs_alphabet() const { return obs_alphabet_; }
  int action_alphabet() const { return action_alphabet_; }
  std::uint64_t input_count() const { return input_count_; }
  /// Number of observable neighbor trajectories through horizon-1.
  std::uint64_t neighbor_span() const { return neighbor_span_; }
  bool deterministic() const { return offsets_.empty(); }

  std::uint64_t index(Signal x, std::span<const Code> neighbor_codes) const;
  void decode_index(std::uint64_t index, Signal& x, std::span<Code> neighbor_codes) const;

  /// Code for a deterministic table.
  Code code(std::uint64_t index) const { return codes_[index]; }

  template <class F>
  void for_each(std::uint64_t index, F&& f) const {
    if (offsets_.empty()) {
      f(codes_[index], 1.0);
      return;
    }
    for (std::uint32_t k = offsets_[index]; k < offsets_[index + 1]; ++k)
      f(outcomes_[k].code, outcomes_[k].prob);
  }

  /// Probability of the trajectory `code` at input `index`.
  double prob(std::uint64_t index, Code code) const;

  std::size_t memory_bytes() const;

  /// Appends the row for the next input index (rows are filled in order).
  void append(std::span<const Outcome> row);
  /// Appends rows built independently (for chunked parallel fills).
  void append_table_rows(const TrajectoryTable& chunk);
  std::uint64_t rows_filled() const { return filled_; }
  void reserve_all();

  /// Raw storage, used by serialization.
  const std::vector<Code>& codes() const { return codes_; }
  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  void set_storage(std::vector<Code> codes, std::vector<std::uint32_t> offsets,
                   std::vector<Outcome> outcomes);

  /// Estimated bytes for a deterministic table of the given shape.
  static std::uint64_t estimate_bytes(int horizon, int num_neighbors, int num_signals,
                                      int obs_alphabet);

 private:
  void make_sparse();

  int horizon_ = 0;
  int num_neighbors_ = 0;
  int num_signals_ = 0;
  int obs_alphabet_ = 0;
  int action_alphabet_ = 0;
  std::uint64_t neighbor_span_ = 1;
  std::uint64_t input_count_ = 0;
  std::uint64_t filled_ = 0;
  std::vector<Code> codes_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Outcome> outcomes_;
};

}  // namespace bsl
