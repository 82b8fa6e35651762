#include "bsl/trajectory_table.hpp"

#include <limits>

namespace bsl {

TrajectoryTable::TrajectoryTable(int horizon, int num_neighbors, int num_signals,
                                 int obs_alphabet, int action_alphabet)
    : horizon_(horizon),
      num_neighbors_(num_neighbors),
      num_signals_(num_signals),
      obs_alphabet_(obs_alphabet),
      action_alphabet_(action_alphabet) {
  if (horizon < 0 || num_neighbors < 0) throw ConfigError("invalid decision table shape");
  checked_pow(static_cast<std::uint64_t>(action_alphabet), horizon + 1,
              std::numeric_limits<Code>::max());
  neighbor_span_ = checked_pow(static_cast<std::uint64_t>(obs_alphabet), horizon,
                               std::numeric_limits<Code>::max());
  input_count_ = static_cast<std::uint64_t>(num_signals) *
                 checked_pow(neighbor_span_, num_neighbors, std::uint64_t{1} << 40);
}

void TrajectoryTable::reserve_all() { codes_.reserve(input_count_); }

std::uint64_t TrajectoryTable::estimate_bytes(int horizon, int num_neighbors, int num_signals,
                                              int obs_alphabet) {
  std::uint64_t span = checked_pow(static_cast<std::uint64_t>(obs_alphabet), horizon);
  return static_cast<std::uint64_t>(num_signals) *
         checked_pow(span, num_neighbors, std::uint64_t{1} << 60) * sizeof(Code);
}

std::uint64_t TrajectoryTable::index(Signal x, std::span<const Code> neighbor_codes) const {
  std::uint64_t idx = 0;
  for (std::size_t m = neighbor_codes.size(); m-- > 0;)
    idx = idx * neighbor_span_ + neighbor_codes[m];
  return idx * static_cast<std::uint64_t>(num_signals_) + static_cast<std::uint64_t>(x);
}

void TrajectoryTable::decode_index(std::uint64_t index, Signal& x,
                                   std::span<Code> neighbor_codes) const {
  x = static_cast<Signal>(index % static_cast<std::uint64_t>(num_signals_));
  index /= static_cast<std::uint64_t>(num_signals_);
  for (auto& c : neighbor_codes) {
    c = static_cast<Code>(index % neighbor_span_);
    index /= neighbor_span_;
  }
}

double TrajectoryTable::prob(std::uint64_t index, Code code) const {
  double p = 0.0;
  for_each(index, [&](Code c, double q) {
    if (c == code) p += q;
  });
  return p;
}

std::size_t TrajectoryTable::memory_bytes() const {
  return codes_.capacity() * sizeof(Code) + offsets_.capacity() * sizeof(std::uint32_t) +
         outcomes_.capacity() * sizeof(Outcome);
}

void TrajectoryTable::make_sparse() {
  offsets_.resize(codes_.size() + 1);
  outcomes_.reserve(codes_.size() + 16);
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    offsets_[i] = static_cast<std::uint32_t>(i);
    outcomes_.push_back({codes_[i], 1.0});
  }
  offsets_[codes_.size()] = static_cast<std::uint32_t>(codes_.size());
  codes_.clear();
  codes_.shrink_to_fit();
}

void TrajectoryTable::append(std::span<const Outcome> row) {
  if (filled_ >= input_count_) throw InvariantError("decision table overfilled");
  const bool point = row.size() == 1 && row.front().prob == 1.0;
  if (offsets_.empty() && !point) make_sparse();
  if (offsets_.empty()) {
    codes_.push_back(row.front().code);
  } else {
    for (const auto& o : row) outcomes_.push_back(o);
    offsets_.push_back(static_cast<std::uint32_t>(outcomes_.size()));
  }
  ++filled_;
}

void TrajectoryTable::append_table_rows(const TrajectoryTable& chunk) {
  for (std::uint64_t i = 0; i < chunk.rows_filled(); ++i) {
    if (chunk.deterministic()) {
      Outcome o{chunk.codes_[i], 1.0};
      append(std::span<const Outcome>(&o, 1));
    } else {
      append(std::span<const Outcome>(chunk.outcomes_.data() + chunk.offsets_[i],
                                      chunk.offsets_[i + 1] - chunk.offsets_[i]));
    }
  }
}

void TrajectoryTable::set_storage(std::vector<Code> codes, std::vector<std::uint32_t> offsets,
                                  std::vector<Outcome> outcomes) {
  codes_ = std::move(codes);
  offsets_ = std::move(offsets);
  outcomes_ = std::move(outcomes);
  filled_ = offsets_.empty() ? codes_.size() : offsets_.size() - 1;
  if (filled_ != input_count_) throw ConfigError("decision table storage has wrong size");
}

}  // namespace bsl
