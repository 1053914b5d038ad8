// SPDX-License-Identifier: Apache-2.0
//
// On-disk formats. All integers and reals are little-endian; reals are
// IEEE-754 binary32 on disk and widened to double on load.
//
// FeatureFile
//   "LAMMFEAT" | u32 version=1 | u32 d_feat | u64 count | u32 n_categories
//   | n_categories x (u32 len, UTF-8 name)
//   | count x (u64 id, u32 label, d_feat x f32)
//
// VocabFile
//   "LAMMVOCB" | u32 version=1 | u32 vocab_size | u32 d_model
//   | vocab_size x (u32 len, UTF-8 token) | vocab_size x d_model f32, row-major
//
// CheckpointFile
//   "LAMMCKPT" | u32 version=1 | u32 K | u32 d_model | u32 ctx_len
//   | K x d_model f32 rows | K x d_model f32 reference rows | ctx_len x d_model f32 context
//   | JSON metadata (UTF-8) | u64 offset of the JSON metadata

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lamm/encoders/image_features.hpp"
#include "lamm/losses/losses.hpp"
#include "lamm/prompting/class_table.hpp"
#include "lamm/prompting/vocabulary.hpp"
#include "lamm/store/binary_io.hpp"

namespace lamm::store {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::string_view kFeatureMagic = "LAMMFEAT";
inline constexpr std::string_view kVocabMagic = "LAMMVOCB";
inline constexpr std::string_view kCheckpointMagic = "LAMMCKPT";

Bytes encode_features(const FeatureDataset& dataset);
/// Features whose norm is off by more than 1e-6 are renormalized (warning past 1e-3).
FeatureDataset decode_features(std::span<const std::uint8_t> bytes);
void save_features(const std::filesystem::path& path, const FeatureDataset& dataset);
FeatureDataset load_features(const std::filesystem::path& path);

Bytes encode_vocab(const Vocabulary& vocab);
Vocabulary decode_vocab(std::span<const std::uint8_t> bytes);
void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary load_vocab(const std::filesystem::path& path);

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::size_t shots = 0;
    LossWeights weights;
    double tau = 0.01;
    KdMode kd_mode = KdMode::literal;
    InitMode init = InitMode::word;
    std::uint64_t encoder_hash = 0;
    std::uint64_t encoder_seed = 0;
    std::uint64_t vocab_hash = 0;
    std::string prompt_template;
};

struct Checkpoint {
    ClassEmbeddingTable table;
    std::optional<SoftContext> context;
    CheckpointMeta meta;
};

Bytes encode_checkpoint(const Checkpoint& ckpt);
/// Structural decode only; no encoder check.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// DataError when the stored encoder hash differs from `live_encoder_hash`.
Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> live_encoder_hash);

/// Format check of any file this engine writes (binary formats, JSON reports,
/// CSV tables). Returns a one-line summary; throws DataError/FormatError.
std::string validate_file(const std::filesystem::path& path);

}  // namespace lamm::store
