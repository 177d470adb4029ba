#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace blockquant {

/// Candidate block as supplied by a caller or parser: block size `m` and the
/// natural logs of its r+1 largest observations, largest first.
struct Block {
  std::size_t m = 0;
  std::vector<double> top_log;
};

/// Read-only view of one validated block.
class BlockView {
 public:
  BlockView(std::size_t m, std::span<const double> top_log) : m_(m), top_log_(top_log) {}

  std::size_t m() const noexcept { return m_; }
  std::size_t r() const noexcept { return top_log_.size() - 1; }
  std::span<const double> top_log() const noexcept { return top_log_; }
  /// log X_{m,j}, 1-based rank.
  double log_order_stat(std::size_t rank) const { return top_log_[rank - 1]; }
  /// log X_{m,r+1}, the threshold order statistic.
  double threshold() const noexcept { return top_log_.back(); }

 private:
  std::size_t m_;
  std::span<const double> top_log_;
};

/// Validated, immutable block data. Values for all blocks live in one flat
/// buffer; every block holds between 2 and m entries, non-increasing and
/// non-negative.
class BlockData {
 public:
  /// Validates candidate blocks. Throws Error with TooFewBlocks, TooFewRanks,
  /// RanksExceedBlockSize, NonMonotoneBlock, NegativeLogValue or NonFiniteValue.
  static BlockData validate(std::span<const Block> blocks);

  /// Validates k equal-shaped blocks stored back to back in `values`
  /// (k*(r+1) entries).
  static BlockData homogeneous(std::size_t m, std::size_t r, std::vector<double> values);

  std::size_t size() const noexcept { return m_.size(); }
  BlockView operator[](std::size_t i) const;

  bool is_homogeneous() const noexcept { return homogeneous_; }
  /// Shared block size / rank count; only meaningful when is_homogeneous().
  std::size_t common_m() const noexcept { return m_.front(); }
  std::size_t common_r() const noexcept { return offsets_[1] - offsets_[0] - 1; }
  /// Sum of r_i over all blocks (r*k in the homogeneous case).
  std::size_t total_ranks() const noexcept { return total_ranks_; }

  std::vector<Block> to_blocks() const;
  /// Returns a copy with `shift` added to every log value.
  BlockData shifted(double shift) const;

  friend bool operator==(const BlockData&, const BlockData&) = default;

 private:
  BlockData(std::vector<std::size_t> m, std::vector<std::size_t> offsets, std::vector<double> values);

  std::vector<std::size_t> m_;
  std::vector<std::size_t> offsets_;  // size() + 1 entries
  std::vector<double> values_;
  std::size_t total_ranks_ = 0;
  bool homogeneous_ = true;
};

/// Splits a raw sample into k consecutive blocks of m = floor(n/k)
/// observations (the trailing n - k*m values are dropped), replaces each value
/// x by max(x, 1) and keeps the logs of the r+1 largest per block.
/// Throws InsufficientData when k*(r+1) > n.
BlockData blockify(std::span<const double> sample, std::size_t k, std::size_t r);

// CSV block format: header `block_id,m,rank,log_value`, one row per
// (block, rank). Blocks keep the order of their first row.
BlockData read_block_csv(std::istream& in);
void write_block_csv(std::ostream& out, const BlockData& data);

/// One positive real per line; blank lines and `#` comments are skipped.
std::vector<double> read_raw_sample(std::istream& in);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

}  // namespace blockquant
