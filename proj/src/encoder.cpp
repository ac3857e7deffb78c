#include "gamesum/encoder.hpp"

#include "gamesum/common.hpp"
#include "gamesum/rng.hpp"

namespace gamesum {

nn::Vec EncoderBackend::summarize(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw ValidationError("summarize: empty token sequence");
  return nn::mean_of(encode(tokens));
}

HashEncoder::HashEncoder(std::size_t dim, std::size_t max_len, std::uint64_t salt)
    : dim_(dim), max_len_(max_len), salt_(salt) {}

nn::Vec HashEncoder::token_vector(const std::string& token) const {
  Rng rng(fnv1a64(token) ^ salt_);
  nn::Vec v(dim_, 0.0);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

std::vector<nn::Vec> HashEncoder::encode(std::span<const std::string> tokens) const {
  std::vector<nn::Vec> out;
  out.reserve(tokens.size());
  for (const std::string& token : tokens) out.push_back(token_vector(token));
  return out;
}

std::unique_ptr<EncoderBackend> make_encoder(const std::string& name,
                                             std::size_t dim, std::size_t max_len) {
  if (name == "hash") return std::make_unique<HashEncoder>(dim, max_len);
  throw ValidationError("unknown encoder backend: " + name);
}

}  // namespace gamesum
