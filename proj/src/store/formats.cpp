// SPDX-License-Identifier: Apache-2.0

#include "lamm/store/formats.hpp"

#include <algorithm>
#include <json.hpp>
#include <limits>

#include "lamm/errors.hpp"
#include "lamm/harness/evaluate.hpp"
#include "lamm/store/reports.hpp"

namespace lamm::store {

namespace {

using nlohmann::json;

std::uint32_t narrow32(std::size_t v, std::string_view what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw UsageError(std::string(what) + " exceeds 32 bits");
    return static_cast<std::uint32_t>(v);
}

void put_matrix(ByteWriter& w, const num::Tensor& t) {
    for (double v : t.data()) w.put_f32(v);
}

num::Tensor get_matrix(ByteReader& r, std::size_t rows, std::size_t cols, std::string_view field) {
    num::Tensor t({rows, cols});
    for (auto& v : t.data()) v = r.f32(field);
    return t;
}

void check_version(ByteReader& r) {
    const auto at = r.offset();
    const auto v = r.u32("version");
    if (v != kFormatVersion)
        throw FormatError(at, "unsupported format version " + std::to_string(v));
}

void expect_end(const ByteReader& r) {
    if (r.remaining() != 0)
        throw FormatError(r.offset(), std::to_string(r.remaining()) + " unexpected trailing bytes");
}

std::uint64_t parse_hex(const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &used, 16);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw DataError("malformed hash '" + s + "' in checkpoint metadata");
    return v;
}

}  // namespace

Bytes encode_features(const FeatureDataset& dataset) {
    dataset.validate();
    ByteWriter w;
    w.put_magic(kFeatureMagic);
    w.put_u32(kFormatVersion);
    w.put_u32(narrow32(dataset.d_feat, "d_feat"));
    w.put_u64(dataset.records.size());
    w.put_u32(narrow32(dataset.categories.size(), "category count"));
    for (const auto& c : dataset.categories) w.put_string(c);
    for (const auto& r : dataset.records) {
        w.put_u64(r.id);
        w.put_u32(r.label);
        for (double v : r.feature) w.put_f32(v);
    }
    return w.take();
}

FeatureDataset decode_features(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic(kFeatureMagic, "feature file");
    check_version(r);
    FeatureDataset ds;
    ds.d_feat = r.u32("d_feat");
    if (ds.d_feat == 0) throw FormatError(r.offset() - 4, "d_feat must be positive");
    const auto count = r.u64("item count");
    const auto n_cat = r.u32("category count");
    for (std::uint32_t i = 0; i < n_cat; ++i) ds.categories.push_back(r.string("category name"));
    const auto record_bytes = 12 + 4 * static_cast<std::uint64_t>(ds.d_feat);
    if (count > r.remaining() / record_bytes) {
        throw FormatError(r.offset(), "declared " + std::to_string(count) + " records but only " +
                                          std::to_string(r.remaining()) + " bytes remain");
    }
    ds.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto at = r.offset();
        FeatureRecord rec;
        rec.id = r.u64("item id");
        rec.label = r.u32("label");
        if (rec.label >= n_cat) {
            throw FormatError(at, "item " + std::to_string(rec.id) + " has label " + std::to_string(rec.label) +
                                      " but only " + std::to_string(n_cat) + " categories");
        }
        rec.feature.resize(ds.d_feat);
        for (auto& v : rec.feature) v = r.f32("feature value");
        normalize_feature(rec.feature, rec.id);
        ds.records.push_back(std::move(rec));
    }
    expect_end(r);
    ds.validate();
    return ds;
}

void save_features(const std::filesystem::path& path, const FeatureDataset& dataset) {
    write_file_atomic(path, encode_features(dataset));
}

FeatureDataset load_features(const std::filesystem::path& path) { return decode_features(read_file(path)); }

Bytes encode_vocab(const Vocabulary& vocab) {
    ByteWriter w;
    w.put_magic(kVocabMagic);
    w.put_u32(kFormatVersion);
    w.put_u32(narrow32(vocab.size(), "vocab size"));
    w.put_u32(narrow32(vocab.d_model(), "d_model"));
    for (const auto& t : vocab.tokens()) w.put_string(t);
    put_matrix(w, vocab.embeddings());
    return w.take();
}

Vocabulary decode_vocab(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic(kVocabMagic, "vocabulary file");
    check_version(r);
    const auto size = r.u32("vocab size");
    const auto d_model = r.u32("d_model");
    if (size == 0 || d_model == 0) throw FormatError(r.offset() - 8, "vocab size and d_model must be positive");
    std::vector<std::string> tokens;
    tokens.reserve(size);
    for (std::uint32_t i = 0; i < size; ++i) tokens.push_back(r.string("token"));
    const auto need = static_cast<std::uint64_t>(size) * d_model * 4;
    if (need != r.remaining()) {
        throw FormatError(r.offset(), "embedding matrix needs " + std::to_string(need) + " bytes, found " +
                                          std::to_string(r.remaining()));
    }
    auto emb = get_matrix(r, size, d_model, "embedding value");
    return Vocabulary(std::move(tokens), std::move(emb));
}

void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
    write_file_atomic(path, encode_vocab(vocab));
}

Vocabulary load_vocab(const std::filesystem::path& path) { return decode_vocab(read_file(path)); }

Bytes encode_checkpoint(const Checkpoint& ckpt) {
    const auto& t = ckpt.table;
    const auto ctx_len = ckpt.context ? ckpt.context->length() : 0;
    if (ckpt.context && ckpt.context->vectors.cols() != t.d_model())
        throw UsageError("context width differs from the class table");
    ByteWriter w;
    w.put_magic(kCheckpointMagic);
    w.put_u32(kFormatVersion);
    w.put_u32(narrow32(t.size(), "class count"));
    w.put_u32(narrow32(t.d_model(), "d_model"));
    w.put_u32(narrow32(ctx_len, "context length"));
    put_matrix(w, t.rows());
    put_matrix(w, t.reference_rows());
    if (ckpt.context) put_matrix(w, ckpt.context->vectors);

    const auto& m = ckpt.meta;
    json meta = {
        {"seed", m.seed},
        {"shots", m.shots},
        {"lambda1", m.weights.lambda1},
        {"lambda2", m.weights.lambda2},
        {"lambda3", m.weights.lambda3},
        {"tau", m.tau},
        {"kd_mode", to_string(m.kd_mode)},
        {"init", to_string(m.init)},
        {"encoder_hash", hex64(m.encoder_hash)},
        {"encoder_seed", m.encoder_seed},
        {"vocab_hash", hex64(m.vocab_hash)},
        {"prompt_template", m.prompt_template},
        {"class_names", t.class_names()},
        {"trainable_mask", t.trainable_mask()},
        {"context_trainable", ckpt.context ? ckpt.context->trainable : false},
    };
    const auto footer_offset = w.size();
    w.put_raw(meta.dump());
    w.put_u64(footer_offset);
    return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect_magic(kCheckpointMagic, "checkpoint");
    check_version(r);
    const auto K = r.u32("class count");
    const auto d = r.u32("d_model");
    const auto ctx_len = r.u32("context length");
    if (K == 0 || d == 0) throw FormatError(r.offset() - 12, "class count and d_model must be positive");
    const auto numeric_end = r.offset() + (2 * static_cast<std::uint64_t>(K) + ctx_len) * d * 4;
    if (bytes.size() < numeric_end + 8) {
        throw FormatError(bytes.size(), "checkpoint truncated: numeric block and footer need at least " +
                                            std::to_string(numeric_end + 8) + " bytes");
    }
    auto rows = get_matrix(r, K, d, "class row");
    auto reference = get_matrix(r, K, d, "reference row");
    std::optional<num::Tensor> ctx;
    if (ctx_len > 0) ctx = get_matrix(r, ctx_len, d, "context vector");

    ByteReader tail(bytes);
    tail.seek(bytes.size() - 8);
    const auto footer = tail.u64("footer offset");
    if (footer != r.offset()) {
        throw FormatError(bytes.size() - 8, "footer offset " + std::to_string(footer) +
                                                " does not point at the end of the numeric block (" +
                                                std::to_string(r.offset()) + ")");
    }
    const auto text = r.raw(bytes.size() - 8 - r.offset(), "metadata");
    json meta;
    try {
        meta = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(footer, std::string("metadata is not valid JSON: ") + e.what());
    }

    Checkpoint c;
    try {
        auto names = meta.at("class_names").get<std::vector<std::string>>();
        auto mask = meta.at("trainable_mask").get<std::vector<bool>>();
        c.table = ClassEmbeddingTable(std::move(names), std::move(rows), std::move(reference), std::move(mask));
        if (ctx) {
            SoftContext sc;
            sc.vectors = *ctx;
            sc.initial = *ctx;
            sc.trainable = meta.at("context_trainable").get<bool>();
            c.context = std::move(sc);
        }
        auto& m = c.meta;
        m.seed = meta.at("seed").get<std::uint64_t>();
        m.shots = meta.at("shots").get<std::size_t>();
        m.weights.shots = m.shots;
        m.weights.lambda1 = meta.at("lambda1").get<double>();
        m.weights.lambda2 = meta.at("lambda2").get<double>();
        m.weights.lambda3 = meta.at("lambda3").get<double>();
        m.tau = meta.at("tau").get<double>();
        m.kd_mode = parse_kd_mode(meta.at("kd_mode").get<std::string>());
        m.init = parse_init_mode(meta.at("init").get<std::string>());
        m.encoder_hash = parse_hex(meta.at("encoder_hash").get<std::string>());
        m.encoder_seed = meta.at("encoder_seed").get<std::uint64_t>();
        m.vocab_hash = parse_hex(meta.at("vocab_hash").get<std::string>());
        m.prompt_template = meta.at("prompt_template").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError(footer, std::string("bad checkpoint metadata: ") + e.what());
    } catch (const UsageError& e) {
        throw FormatError(footer, std::string("bad checkpoint metadata: ") + e.what());
    }
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> live_encoder_hash) {
    auto c = decode_checkpoint(read_file(path));
    if (live_encoder_hash && *live_encoder_hash != c.meta.encoder_hash) {
        throw DataError("encoder hash mismatch: checkpoint was trained with " + hex64(c.meta.encoder_hash) +
                        ", live encoder is " + hex64(*live_encoder_hash));
    }
    return c;
}

std::string validate_file(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    const auto starts = [&](std::string_view magic) {
        return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
    };
    if (starts(kFeatureMagic)) {
        const auto ds = decode_features(bytes);
        return "feature file: " + std::to_string(ds.records.size()) + " items, " +
               std::to_string(ds.categories.size()) + " categories, d_feat " + std::to_string(ds.d_feat);
    }
    if (starts(kVocabMagic)) {
        const auto v = decode_vocab(bytes);
        return "vocabulary file: " + std::to_string(v.size()) + " tokens, d_model " + std::to_string(v.d_model());
    }
    if (starts(kCheckpointMagic)) {
        const auto c = decode_checkpoint(bytes);
        return "checkpoint: " + std::to_string(c.table.size()) + " classes, d_model " +
               std::to_string(c.table.d_model()) + ", context length " +
               std::to_string(c.context ? c.context->length() : 0) + ", encoder " + hex64(c.meta.encoder_hash);
    }
    const std::string text(bytes.begin(), bytes.end());
    return validate_report_text(text);
}

}  // namespace lamm::store
