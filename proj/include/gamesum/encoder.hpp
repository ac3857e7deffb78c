#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gamesum/nn.hpp"

namespace gamesum {

// Contextual encoder abstraction. Production systems plug a pretrained
// masked-language-model here; tests and the default pipeline use the
// deterministic hash encoder below.
class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t max_len() const = 0;

  // One vector per input token, in order. Must be deterministic in
  // evaluation mode.
  virtual std::vector<nn::Vec> encode(std::span<const std::string> tokens) const = 0;

  // Designated summary vector for a whole sentence (a [CLS]-style encoder
  // overrides this; the default is the mean of the token vectors).
  virtual nn::Vec summarize(std::span<const std::string> tokens) const;
};

// Context-free mock encoder: each token maps to a fixed pseudo-random vector
// derived from a hash of its text. Zero downloads, bitwise reproducible.
class HashEncoder : public EncoderBackend {
 public:
  explicit HashEncoder(std::size_t dim = 16, std::size_t max_len = 512,
                       std::uint64_t salt = 0);

  std::size_t dim() const override { return dim_; }
  std::size_t max_len() const override { return max_len_; }
  std::vector<nn::Vec> encode(std::span<const std::string> tokens) const override;
  nn::Vec token_vector(const std::string& token) const;

 private:
  std::size_t dim_;
  std::size_t max_len_;
  std::uint64_t salt_;
};

std::unique_ptr<EncoderBackend> make_encoder(const std::string& name,
                                             std::size_t dim, std::size_t max_len);

}  // namespace gamesum
