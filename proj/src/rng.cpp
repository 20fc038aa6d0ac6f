#include "nsesmc/rng.hpp"

#include <vector>

namespace nsesmc {

namespace {

void push_words(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

std::mt19937_64 seeded_engine(std::vector<std::uint32_t> words) {
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : RngStream(seed, StreamTag::kTest, {}) {}

RngStream::RngStream(std::uint64_t seed, StreamTag tag, std::initializer_list<std::uint64_t> indices) {
  std::vector<std::uint32_t> words;
  push_words(words, seed);
  push_words(words, static_cast<std::uint64_t>(tag));
  for (const std::uint64_t i : indices) push_words(words, i);
  engine_ = seeded_engine(std::move(words));
}

}  // namespace nsesmc
