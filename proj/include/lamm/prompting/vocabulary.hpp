// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lamm/numerics/tensor.hpp"

namespace lamm {

/// Whitespace-tokenized word list with a frozen [vocab_size x d_model] embedding matrix.
class Vocabulary {
public:
    Vocabulary() = default;
    /// Throws DataError on duplicate or empty tokens, or a matrix of the wrong extent.
    Vocabulary(std::vector<std::string> tokens, num::Tensor embeddings);

    std::size_t size() const noexcept { return tokens_.size(); }
    std::size_t d_model() const noexcept { return embeddings_.cols(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const num::Tensor& embeddings() const noexcept { return embeddings_; }

    std::optional<std::size_t> find(std::string_view token) const;
    /// Throws TokenizationError when the token is unknown.
    std::size_t id(std::string_view token) const;
    /// Splits on whitespace; every unknown word is listed in the TokenizationError.
    std::vector<std::size_t> tokenize(std::string_view text) const;

    std::span<const double> embedding(std::size_t id) const { return embeddings_.row(id); }
    std::uint64_t hash() const;

private:
    std::vector<std::string> tokens_;
    num::Tensor embeddings_;
    std::unordered_map<std::string, std::size_t> index_;
};

std::vector<std::string> split_whitespace(std::string_view text);

/// Template words plus a small general word list.
std::vector<std::string> bundled_words();
/// Stock category names used by the synthetic generator ("llama", "zebra", ...).
/// Past the stock list the names continue as "category<N>".
std::vector<std::string> synthetic_category_names(std::size_t count);

/// Vocabulary over `words` with seeded N(0, 0.02^2) embeddings.
Vocabulary make_seeded_vocabulary(std::vector<std::string> words, std::size_t d_model, std::uint64_t seed);

}  // namespace lamm
