// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace lamm {

struct ModelConfig {
    double tau = 0.01;  // logit scale 1/tau = 100
    std::size_t d_model = 32;
    std::size_t d_feat = 32;
    std::size_t n_layers = 2;
    std::size_t n_heads = 4;
    std::size_t max_seq_len = 16;
    std::uint64_t seed = 7;

    /// Throws ConfigError when tau <= 0, d_model % n_heads != 0 or an extent is zero.
    void validate() const;
};

}  // namespace lamm
