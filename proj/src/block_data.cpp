#include "blockquant/block_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "blockquant/error.hpp"

namespace blockquant {
namespace {

std::string block_label(std::size_t i) { return "block " + std::to_string(i + 1); }

void check_block(std::size_t index, std::size_t m, std::span<const double> top_log) {
  if (top_log.size() < 2) {
    throw Error(Errc::TooFewRanks, block_label(index) + " has fewer than 2 order statistics (r >= 1 required)");
  }
  const std::size_t r = top_log.size() - 1;
  if (r >= m) {
    throw Error(Errc::RanksExceedBlockSize, block_label(index) + ": r+1 = " + std::to_string(r + 1) +
                                                " exceeds block size m = " + std::to_string(m));
  }
  for (std::size_t j = 0; j < top_log.size(); ++j) {
    if (!std::isfinite(top_log[j])) {
      throw Error(Errc::NonFiniteValue, block_label(index) + " rank " + std::to_string(j + 1) + " is not finite");
    }
    if (top_log[j] < 0.0) {
      throw Error(Errc::NegativeLogValue, block_label(index) + " rank " + std::to_string(j + 1) + " is negative");
    }
    if (j > 0 && top_log[j] > top_log[j - 1]) {
      throw Error(Errc::NonMonotoneBlock,
                  block_label(index) + ": rank " + std::to_string(j + 1) + " exceeds rank " + std::to_string(j));
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

BlockData::BlockData(std::vector<std::size_t> m, std::vector<std::size_t> offsets, std::vector<double> values)
    : m_(std::move(m)), offsets_(std::move(offsets)), values_(std::move(values)) {
  for (std::size_t i = 0; i < m_.size(); ++i) {
    const std::size_t r = offsets_[i + 1] - offsets_[i] - 1;
    total_ranks_ += r;
    if (m_[i] != m_[0] || r != offsets_[1] - offsets_[0] - 1) homogeneous_ = false;
  }
}

BlockData BlockData::validate(std::span<const Block> blocks) {
  if (blocks.size() < 2) {
    throw Error(Errc::TooFewBlocks, "need at least 2 blocks, got " + std::to_string(blocks.size()));
  }
  std::vector<std::size_t> m;
  std::vector<std::size_t> offsets{0};
  std::vector<double> values;
  m.reserve(blocks.size());
  offsets.reserve(blocks.size() + 1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    check_block(i, blocks[i].m, blocks[i].top_log);
    m.push_back(blocks[i].m);
    values.insert(values.end(), blocks[i].top_log.begin(), blocks[i].top_log.end());
    offsets.push_back(values.size());
  }
  return BlockData(std::move(m), std::move(offsets), std::move(values));
}

BlockData BlockData::homogeneous(std::size_t m, std::size_t r, std::vector<double> values) {
  const std::size_t width = r + 1;
  if (values.size() % width != 0) {
    throw Error(Errc::ParseError, "value count is not a multiple of r+1");
  }
  const std::size_t k = values.size() / width;
  if (k < 2) throw Error(Errc::TooFewBlocks, "need at least 2 blocks, got " + std::to_string(k));
  std::vector<std::size_t> offsets(k + 1);
  for (std::size_t i = 0; i <= k; ++i) offsets[i] = i * width;
  for (std::size_t i = 0; i < k; ++i) {
    check_block(i, m, std::span<const double>(values).subspan(offsets[i], width));
  }
  return BlockData(std::vector<std::size_t>(k, m), std::move(offsets), std::move(values));
}

BlockView BlockData::operator[](std::size_t i) const {
  return BlockView(m_[i], std::span<const double>(values_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]));
}

std::vector<Block> BlockData::to_blocks() const {
  std::vector<Block> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto view = (*this)[i];
    out.push_back(Block{view.m(), std::vector<double>(view.top_log().begin(), view.top_log().end())});
  }
  return out;
}

BlockData BlockData::shifted(double shift) const {
  auto blocks = to_blocks();
  for (auto& b : blocks) {
    for (auto& v : b.top_log) v += shift;
  }
  return validate(blocks);
}

BlockData blockify(std::span<const double> sample, std::size_t k, std::size_t r) {
  if (k < 2) throw Error(Errc::TooFewBlocks, "k must be at least 2");
  if (r < 1) throw Error(Errc::TooFewRanks, "r must be at least 1");
  const std::size_t n = sample.size();
  if (k * (r + 1) > n) {
    throw Error(Errc::InsufficientData, "k*(r+1) = " + std::to_string(k * (r + 1)) +
                                            " exceeds sample size " + std::to_string(n));
  }
  const std::size_t m = n / k;
  std::vector<double> values;
  values.reserve(k * (r + 1));
  std::vector<double> block(m);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x = sample[i * m + j];
      if (!std::isfinite(x)) {
        throw Error(Errc::NonFiniteValue, "sample value " + std::to_string(i * m + j + 1) + " is not finite");
      }
      block[j] = std::max(x, 1.0);
    }
    std::partial_sort(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(r + 1), block.end(),
                      std::greater<>());
    for (std::size_t j = 0; j <= r; ++j) values.push_back(std::log(block[j]));
  }
  return BlockData::homogeneous(m, r, std::move(values));
}

BlockData read_block_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  struct Pending {
    std::size_t m = 0;
    std::size_t first_row = 0;
    std::vector<std::pair<std::size_t, double>> ranks;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> pending;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_fields(text);
    if (!have_header) {
      if (fields.size() != 4 || fields[0] != "block_id" || fields[1] != "m" || fields[2] != "rank" ||
          fields[3] != "log_value") {
        throw Error(Errc::ParseError, "row " + std::to_string(line_no) +
                                          ": expected header 'block_id,m,rank,log_value'");
      }
      have_header = true;
      continue;
    }
    const std::string row = "row " + std::to_string(line_no);
    if (fields.size() != 4) throw Error(Errc::ParseError, row + ": expected 4 fields");
    if (fields[0].empty()) throw Error(Errc::ParseError, row + ": empty block_id");
    std::size_t m = 0;
    std::size_t rank = 0;
    double value = 0.0;
    if (!parse_number(fields[1], m) || m == 0) throw Error(Errc::ParseError, row + ": bad m '" + std::string(fields[1]) + "'");
    if (!parse_number(fields[2], rank) || rank == 0) {
      throw Error(Errc::ParseError, row + ": bad rank '" + std::string(fields[2]) + "'");
    }
    if (!parse_number(fields[3], value)) {
      throw Error(Errc::ParseError, row + ": bad log_value '" + std::string(fields[3]) + "'");
    }
    const std::string id(fields[0]);
    auto [it, inserted] = pending.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.m = m;
      it->second.first_row = line_no;
    } else if (it->second.m != m) {
      throw Error(Errc::ParseError, row + ": block '" + id + "' has inconsistent m");
    }
    it->second.ranks.emplace_back(rank, value);
  }
  if (!have_header) throw Error(Errc::ParseError, "missing header 'block_id,m,rank,log_value'");

  std::vector<Block> blocks;
  blocks.reserve(order.size());
  for (const auto& id : order) {
    auto& p = pending[id];
    std::sort(p.ranks.begin(), p.ranks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Block b{p.m, {}};
    for (std::size_t j = 0; j < p.ranks.size(); ++j) {
      if (p.ranks[j].first != j + 1) {
        throw Error(Errc::ParseError, "block '" + id + "' (first seen at row " + std::to_string(p.first_row) +
                                          "): ranks must cover 1..r+1 exactly once");
      }
      b.top_log.push_back(p.ranks[j].second);
    }
    blocks.push_back(std::move(b));
  }
  return BlockData::validate(blocks);
}

void write_block_csv(std::ostream& out, const BlockData& data) {
  out << "block_id,m,rank,log_value\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto view = data[i];
    for (std::size_t j = 0; j < view.top_log().size(); ++j) {
      out << (i + 1) << ',' << view.m() << ',' << (j + 1) << ',' << format_double(view.top_log()[j]) << '\n';
    }
  }
}

std::vector<double> read_raw_sample(std::istream& in) {
  std::vector<double> sample;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    double x = 0.0;
    if (!parse_number(text, x) || !std::isfinite(x)) {
      throw Error(Errc::ParseError, "row " + std::to_string(line_no) + ": bad value '" + std::string(text) + "'");
    }
    sample.push_back(x);
  }
  return sample;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace blockquant
