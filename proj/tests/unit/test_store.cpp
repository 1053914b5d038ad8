// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "lamm/errors.hpp"
#include "lamm/store/formats.hpp"
#include "lamm/store/reports.hpp"

using namespace lamm;
using namespace lamm::store;
using lamm::testing::TempDir;

namespace {

FeatureDataset sample_features() {
    SyntheticFeatureGenerator gen({3, 8, 0.25, 4});
    return gen.generate(synthetic_category_names(3), 4, 10);
}

Checkpoint sample_checkpoint(bool with_context) {
    auto bb = lamm::testing::small_backbone({"llama", "zebra", "otter"});
    Checkpoint ck;
    ck.table = init_table(bb.vocab, {"llama", "zebra", "otter"}, InitMode::word, 1);
    std::vector<double> moved(ck.table.d_model(), 0.125);
    ck.table.set_row(1, moved);
    ck.table.set_trainable(2, false);
    if (with_context) ck.context = init_context(bb.vocab, 4, 3);
    ck.meta.seed = 3;
    ck.meta.shots = 8;
    ck.meta.weights = LossWeights::defaults(8);
    ck.meta.encoder_hash = bb.encoder.hash();
    ck.meta.encoder_seed = 7;
    ck.meta.vocab_hash = bb.vocab.hash();
    ck.meta.prompt_template = std::string(kDefaultTemplate);
    return ck;
}

void expect_close_f32(const num::Tensor& a, const num::Tensor& b) {
    ASSERT_EQ(a.shape(), b.shape());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(static_cast<float>(a[i]), static_cast<float>(b[i]));
}

}  // namespace

TEST(BinaryIo, LittleEndianLayout) {
    ByteWriter w;
    w.put_u32(0x01020304);
    w.put_u64(0x0a0b0c0d0e0f1011ULL);
    const auto& b = w.bytes();
    EXPECT_EQ(b[0], 0x04);
    EXPECT_EQ(b[3], 0x01);
    EXPECT_EQ(b[4], 0x11);
    EXPECT_EQ(b[11], 0x0a);
    ByteReader r(b);
    EXPECT_EQ(r.u32("a"), 0x01020304u);
    EXPECT_EQ(r.u64("b"), 0x0a0b0c0d0e0f1011ULL);
    EXPECT_EQ(r.remaining(), 0u);
}

TEST(BinaryIo, TruncationReportsOffset) {
    ByteWriter w;
    w.put_u32(7);
    auto bytes = w.take();
    bytes.pop_back();
    ByteReader r(bytes);
    try {
        r.u32("count");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 0u);
        EXPECT_NE(std::string(e.what()).find("byte offset"), std::string::npos);
    }
}

TEST(BinaryIo, NonFiniteRealIsNumericError) {
    ByteWriter w;
    EXPECT_THROW(w.put_f32(NAN), NumericError);
}

TEST(Formats, FeatureRoundTrip) {
    auto ds = sample_features();
    auto back = decode_features(encode_features(ds));
    EXPECT_EQ(back.categories, ds.categories);
    EXPECT_EQ(back.d_feat, ds.d_feat);
    ASSERT_EQ(back.records.size(), ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        EXPECT_EQ(back.records[i].id, ds.records[i].id);
        EXPECT_EQ(back.records[i].label, ds.records[i].label);
        for (std::size_t k = 0; k < ds.d_feat; ++k)
            EXPECT_NEAR(back.records[i].feature[k], ds.records[i].feature[k], 1e-6);
    }
}

TEST(Formats, FeatureHeaderBytes) {
    auto bytes = encode_features(sample_features());
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 8), "LAMMFEAT");
    EXPECT_EQ(bytes[8], 1);  // version
    EXPECT_EQ(bytes[12], 8);  // d_feat
    EXPECT_EQ(bytes[16], 12);  // count
}

TEST(Formats, CorruptedMagicIsDataError) {
    auto bytes = encode_features(sample_features());
    bytes[2] = 'X';
    EXPECT_THROW(decode_features(bytes), DataError);
    auto vb = encode_vocab(make_seeded_vocabulary({"a", "b"}, 4, 1));
    vb[0] = 'Z';
    EXPECT_THROW(decode_vocab(vb), DataError);
}

TEST(Formats, WrongVersionIsFormatError) {
    auto bytes = encode_features(sample_features());
    bytes[8] = 2;
    EXPECT_THROW(decode_features(bytes), FormatError);
}

TEST(Formats, TruncatedFeaturesReportOffset) {
    const auto bytes = encode_features(sample_features());
    auto cut = bytes;
    cut.resize(bytes.size() - 5);
    EXPECT_THROW(decode_features(cut), FormatError);
    auto padded = bytes;
    padded.insert(padded.end(), 6, 0);
    EXPECT_THROW(decode_features(padded), FormatError);
}

TEST(Formats, BadLabelIsDataError) {
    auto ds = sample_features();
    auto bytes = encode_features(ds);
    // First record: after the header and names, u64 id then u32 label.
    std::size_t off = 8 + 4 + 4 + 8 + 4;
    for (const auto& n : ds.categories) off += 4 + n.size();
    bytes[off + 8] = 9;
    EXPECT_THROW(decode_features(bytes), DataError);
}

TEST(Formats, VocabRoundTrip) {
    auto v = make_seeded_vocabulary({"a", "photo", "of", "llama"}, 6, 2);
    auto back = decode_vocab(encode_vocab(v));
    EXPECT_EQ(back.tokens(), v.tokens());
    expect_close_f32(back.embeddings(), v.embeddings());
}

TEST(Formats, CheckpointRoundTrip) {
    for (bool ctx : {false, true}) {
        auto ck = sample_checkpoint(ctx);
        auto back = decode_checkpoint(encode_checkpoint(ck));
        EXPECT_EQ(back.table.class_names(), ck.table.class_names());
        EXPECT_EQ(back.table.trainable_mask(), ck.table.trainable_mask());
        expect_close_f32(back.table.rows(), ck.table.rows());
        expect_close_f32(back.table.reference_rows(), ck.table.reference_rows());
        ASSERT_EQ(back.context.has_value(), ctx);
        if (ctx) expect_close_f32(back.context->vectors, ck.context->vectors);
        EXPECT_EQ(back.meta.seed, 3u);
        EXPECT_EQ(back.meta.shots, 8u);
        EXPECT_DOUBLE_EQ(back.meta.weights.lambda1, 0.125);
        EXPECT_EQ(back.meta.encoder_hash, ck.meta.encoder_hash);
        EXPECT_EQ(back.meta.prompt_template, ck.meta.prompt_template);
    }
}

TEST(Formats, CheckpointEncodingIsDeterministic) {
    EXPECT_EQ(encode_checkpoint(sample_checkpoint(true)), encode_checkpoint(sample_checkpoint(true)));
}

TEST(Formats, EncoderHashMismatchIsDataError) {
    TempDir dir("hash");
    auto ck = sample_checkpoint(false);
    save_checkpoint(dir.file("c.ckpt"), ck);
    auto mc = lamm::testing::small_model();
    mc.seed = 8;
    const auto other = init_text_encoder(mc).hash();
    ASSERT_NE(other, ck.meta.encoder_hash);
    EXPECT_THROW(load_checkpoint(dir.file("c.ckpt"), other), DataError);
    EXPECT_NO_THROW(load_checkpoint(dir.file("c.ckpt"), ck.meta.encoder_hash));
}

TEST(Formats, AtomicWriteLeavesNoTemp) {
    TempDir dir("atomic");
    save_features(dir.file("x.feat"), sample_features());
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
        (void)e;
        ++files;
    }
    EXPECT_EQ(files, 1u);
    EXPECT_EQ(load_features(dir.file("x.feat")).records.size(), 12u);
}

TEST(Formats, MissingFileIsDataError) {
    EXPECT_THROW(load_features("/nonexistent/lamm/x.feat"), DataError);
}

TEST(Validate, AcceptsEveryWriter) {
    TempDir dir("validate");
    save_features(dir.file("a.feat"), sample_features());
    save_vocab(dir.file("a.vocab"), make_seeded_vocabulary({"a", "b"}, 4, 1));
    save_checkpoint(dir.file("a.ckpt"), sample_checkpoint(true));

    EvalReport er;
    er.categories = {"llama", "zebra"};
    er.per_class_accuracy = {1.0, 0.5};
    er.per_class_count = {2, 2};
    er.n = 4;
    er.accuracy = 0.75;
    er.fingerprint = hex64(1);
    write_text_atomic(dir.file("e.json"), eval_report_json(er));

    IncrementalReport ir;
    ir.acc_set1_before = ir.acc_set1_after = 0.9;
    write_text_atomic(dir.file("i.json"), incremental_report_json(ir, IncrementalMode::lamm));

    SweepResult sw{{1, 2}, {{1, {0.5, 0.7}, 0.6}}};
    write_text_atomic(dir.file("s.json"), sweep_json(sw));
    write_text_atomic(dir.file("s.csv"), sweep_csv(sw));
    std::vector<AblationRow> ab{{true, false, true, 0.8, {0.8}}};
    write_text_atomic(dir.file("a.json"), ablation_json(ab, {1}));
    write_text_atomic(dir.file("a.csv"), ablation_csv(ab));
    TrainTrace tr;
    tr.steps.push_back({0, 0, {1.0, 0.0, 0.0, 0.5, 1.025}, 0.002});
    write_text_atomic(dir.file("t.csv"), trace_csv(tr));

    for (const char* f : {"a.feat", "a.vocab", "a.ckpt", "e.json", "i.json", "s.json", "s.csv", "a.json", "a.csv", "t.csv"})
        EXPECT_NO_THROW(validate_file(dir.file(f))) << f;
}

TEST(Validate, RejectsInconsistentReports) {
    TempDir dir("reject");
    EvalReport er;
    er.categories = {"llama"};
    er.per_class_accuracy = {1.0};
    er.per_class_count = {3};
    er.n = 3;
    er.accuracy = 0.5;
    write_text_atomic(dir.file("e.json"), eval_report_json(er));
    EXPECT_THROW(validate_file(dir.file("e.json")), DataError);
    write_text_atomic(dir.file("t.csv"), "step,epoch,ce,wc,cos,kd,total,lr\n0,0,1,nan,0,0,1,0.1\n");
    EXPECT_THROW(validate_file(dir.file("t.csv")), DataError);
    write_text_atomic(dir.file("junk.bin"), "hello world");
    EXPECT_THROW(validate_file(dir.file("junk.bin")), DataError);
}
