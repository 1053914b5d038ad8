// SPDX-License-Identifier: Apache-2.0

#include "lamm/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "lamm/errors.hpp"
#include "lamm/harness/experiments.hpp"
#include "lamm/harness/synthetic.hpp"
#include "lamm/log.hpp"
#include "lamm/store/formats.hpp"
#include "lamm/store/reports.hpp"

namespace lamm {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct DataOptions {
    std::string features;
    std::string test_features;
    std::string vocab;
    std::uint64_t encoder_seed = 7;
    double tau = 0.01;
};

struct TrainOptions {
    std::size_t shots = 16;
    std::uint64_t seed = 1;
    std::size_t epochs = 50;
    std::size_t batch_size = 0;
    double lr = 0.002;
    std::optional<double> lambda1, lambda2, lambda3;
    std::string kd_mode = "literal";
    std::string init = "word";
    std::size_t context_len = 0;

    TrainConfig config() const {
        TrainConfig c;
        c.shots = shots;
        c.seed = seed;
        c.epochs = epochs;
        c.batch_size = batch_size;
        c.lr = lr;
        c.lambda1 = lambda1;
        c.lambda2 = lambda2;
        c.lambda3 = lambda3;
        c.kd_mode = parse_kd_mode(kd_mode);
        c.init = parse_init_mode(init);
        c.context_len = context_len;
        c.validate();
        return c;
    }
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool need_vocab = true) {
    cmd->add_option("--features", o.features, "FeatureFile with the labeled pool")->required();
    cmd->add_option("--test-features", o.test_features, "FeatureFile used as the test set instead of the pool remainder");
    auto* v = cmd->add_option("--vocab", o.vocab, "VocabFile");
    if (need_vocab) v->required();
    cmd->add_option("--encoder-seed", o.encoder_seed, "seed of the frozen text encoder")->capture_default_str();
    cmd->add_option("--tau", o.tau, "softmax temperature")->capture_default_str();
}

void add_train_options(CLI::App* cmd, TrainOptions& o, bool with_shots_seed = true) {
    if (with_shots_seed) {
        cmd->add_option("--shots", o.shots, "training items per class")->capture_default_str();
        cmd->add_option("--seed", o.seed, "run seed")->capture_default_str();
    }
    cmd->add_option("--epochs", o.epochs)->capture_default_str();
    cmd->add_option("--batch-size", o.batch_size, "0 selects min(32, K * shots)")->capture_default_str();
    cmd->add_option("--lr", o.lr)->capture_default_str();
    cmd->add_option("--lambda1", o.lambda1, "weight consolidation weight (default 1/shots)");
    cmd->add_option("--lambda2", o.lambda2, "feature cosine weight (default 1)");
    cmd->add_option("--lambda3", o.lambda3, "distillation weight (default 0.05)");
    cmd->add_option("--kd-mode", o.kd_mode)->check(CLI::IsMember({"literal", "swapped"}))->capture_default_str();
    cmd->add_option("--init", o.init)->check(CLI::IsMember({"word", "random"}))->capture_default_str();
    cmd->add_option("--context-len", o.context_len, "soft context length, 0 for none")->capture_default_str();
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoull(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " list entry '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

struct Loaded {
    FeatureDataset pool;
    std::optional<FeatureDataset> test;
    Backbone backbone;
};

Loaded load_inputs(const DataOptions& o) {
    auto pool = store::load_features(o.features);
    std::optional<FeatureDataset> test;
    if (!o.test_features.empty()) {
        test = store::load_features(o.test_features);
        if (test->categories != pool.categories)
            throw DataError("test features declare a different category list than the pool");
    }
    ModelConfig mc;
    mc.tau = o.tau;
    mc.d_feat = pool.d_feat;
    mc.seed = o.encoder_seed;
    auto vocab = store::load_vocab(o.vocab);
    return {std::move(pool), std::move(test), make_backbone(mc, std::move(vocab))};
}

void write_if(const std::string& path, const std::string& text) {
    if (!path.empty()) store::write_text_atomic(path, text);
}

store::Checkpoint make_checkpoint(const TrainResult& run, const TrainConfig& tc, const Backbone& bb) {
    store::Checkpoint c{run.table, run.context, {}};
    auto& m = c.meta;
    m.seed = tc.seed;
    m.shots = tc.shots;
    m.weights = tc.weights();
    m.tau = bb.tau();
    m.kd_mode = tc.kd_mode;
    m.init = tc.init;
    m.encoder_hash = bb.encoder.hash();
    m.encoder_seed = bb.config.seed;
    m.vocab_hash = bb.vocab.hash();
    m.prompt_template = bb.prompt_template;
    return c;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Label-aligned prompt tuning over a frozen toy text encoder"};
    app.require_subcommand(1);

    // gen-synthetic
    SyntheticSetConfig gen;
    std::string gen_out;
    double shift_sigma = -1.0;
    ModelConfig gen_encoder;
    auto* c_gen = app.add_subcommand("gen-synthetic", "write a synthetic FeatureFile and VocabFile");
    c_gen->add_option("--classes", gen.features.classes)->capture_default_str();
    c_gen->add_option("--d-feat", gen.features.d_feat)->capture_default_str();
    c_gen->add_option("--sigma", gen.features.sigma, "noise norm relative to the unit class means")
        ->capture_default_str();
    c_gen->add_option("--seed", gen.features.seed, "generator seed")->capture_default_str();
    c_gen->add_option("--per-class", gen.per_class)->capture_default_str();
    c_gen->add_option("--d-model", gen.d_model)->capture_default_str();
    c_gen->add_option("--vocab-seed", gen.vocab_seed)->capture_default_str();
    c_gen->add_option("--align-epochs", gen.align_epochs)->capture_default_str();
    c_gen->add_option("--align-lr", gen.align_lr)->capture_default_str();
    c_gen->add_flag("--adversarial", gen.adversarial, "fit category words to rotated class means");
    c_gen->add_option("--encoder-seed", gen_encoder.seed)->capture_default_str();
    c_gen->add_option("--shift-sigma", shift_sigma, "also write <out>.shift.feat with this noise level");
    c_gen->add_option("--out", gen_out, "output prefix: <out>.feat and <out>.vocab")->required();

    // zero-shot
    DataOptions zs;
    std::string zs_out;
    auto* c_zs = app.add_subcommand("zero-shot", "evaluate the original category-word prompts");
    add_data_options(c_zs, zs);
    c_zs->add_option("--out", zs_out, "EvalReport JSON path");

    // train
    DataOptions tr;
    TrainOptions tro;
    std::string tr_out, tr_trace;
    auto* c_tr = app.add_subcommand("train", "train class embeddings and write a checkpoint");
    add_data_options(c_tr, tr);
    add_train_options(c_tr, tro);
    c_tr->add_option("--out", tr_out, "checkpoint path")->required();
    c_tr->add_option("--trace", tr_trace, "per-step loss CSV path");

    // eval
    DataOptions ev;
    std::string ev_ckpt, ev_out;
    bool ev_all = false;
    auto* c_ev = app.add_subcommand("eval", "evaluate a checkpoint");
    add_data_options(c_ev, ev);
    c_ev->add_option("--checkpoint", ev_ckpt)->required();
    c_ev->add_flag("--all", ev_all, "score every pool item instead of the items the run did not train on");
    c_ev->add_option("--out", ev_out, "EvalReport JSON path");

    // sweep
    DataOptions sw;
    TrainOptions swo;
    std::string sw_shots = "1,2,4,8,16", sw_seeds = "1,2,3", sw_out, sw_csv;
    auto* c_sw = app.add_subcommand("sweep", "train and evaluate over shot counts and seeds");
    add_data_options(c_sw, sw);
    add_train_options(c_sw, swo, false);
    c_sw->add_option("--shots", sw_shots, "comma-separated shot counts")->capture_default_str();
    c_sw->add_option("--seeds", sw_seeds, "comma-separated seeds")->capture_default_str();
    c_sw->add_option("--out", sw_out, "sweep JSON path");
    c_sw->add_option("--csv", sw_csv, "sweep CSV path");

    // ablate
    DataOptions ab;
    TrainOptions abo;
    std::string ab_seeds = "1,2,3", ab_out, ab_csv;
    auto* c_ab = app.add_subcommand("ablate", "all on/off combinations of the three regularizers");
    add_data_options(c_ab, ab);
    add_train_options(c_ab, abo, false);
    c_ab->add_option("--shots", abo.shots)->capture_default_str();
    c_ab->add_option("--seeds", ab_seeds)->capture_default_str();
    c_ab->add_option("--out", ab_out, "ablation JSON path");
    c_ab->add_option("--csv", ab_csv, "ablation CSV path");

    // incremental
    DataOptions in;
    TrainOptions ino;
    std::string in_mode = "lamm", in_out;
    bool in_joint = false;
    auto* c_in = app.add_subcommand("incremental", "train on Set 1, then Set 2, and measure Set 1 degradation");
    add_data_options(c_in, in);
    add_train_options(c_in, ino);
    c_in->add_option("--mode", in_mode)->check(CLI::IsMember({"lamm", "coop"}))->capture_default_str();
    c_in->add_flag("--joint", in_joint, "score Set 1 against every class row");
    c_in->add_option("--out", in_out, "IncrementalReport JSON path");

    // domain-shift
    DataOptions ds;
    std::string ds_ckpt, ds_alt, ds_out;
    auto* c_ds = app.add_subcommand("domain-shift", "evaluate a checkpoint on features from another distribution");
    add_data_options(c_ds, ds);
    c_ds->add_option("--checkpoint", ds_ckpt)->required();
    c_ds->add_option("--alt-features", ds_alt)->required();
    c_ds->add_option("--out", ds_out, "EvalReport JSON path");

    // validate
    std::vector<std::string> val_paths;
    auto* c_val = app.add_subcommand("validate", "format check of any file this tool writes");
    c_val->add_option("paths", val_paths)->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (c_gen->parsed()) {
        gen_encoder.d_feat = gen.features.d_feat;
        const auto set = make_synthetic_set(gen, gen_encoder);
        store::save_features(gen_out + ".feat", set.dataset);
        store::save_vocab(gen_out + ".vocab", set.vocab);
        out << "wrote " << gen_out << ".feat (" << set.dataset.records.size() << " items) and " << gen_out
            << ".vocab (" << set.vocab.size() << " tokens)\n";
        if (shift_sigma >= 0.0) {
            const auto shifted = make_shifted_features(gen, shift_sigma, set.dataset.records.size());
            store::save_features(gen_out + ".shift.feat", shifted);
            out << "wrote " << gen_out << ".shift.feat (sigma " << shift_sigma << ")\n";
        }
        return kExitOk;
    }
    if (c_zs->parsed()) {
        const auto in_data = load_inputs(zs);
        const auto& test = in_data.test ? *in_data.test : in_data.pool;
        const auto r = zero_shot_eval(in_data.backbone, test);
        out << "zero-shot accuracy " << fmt(r.accuracy) << " (" << r.n << " items)\n";
        write_if(zs_out, store::eval_report_json(r));
        return kExitOk;
    }
    if (c_tr->parsed()) {
        const auto tc = tro.config();
        const auto in_data = load_inputs(tr);
        const auto run = train(in_data.backbone, in_data.pool, tc);
        store::save_checkpoint(tr_out, make_checkpoint(run, tc, in_data.backbone));
        write_if(tr_trace, store::trace_csv(run.trace));
        const auto& last = run.trace.steps.back().loss;
        out << "trained " << run.trace.steps.size() << " steps: ce " << fmt(last.ce) << " wc " << fmt(last.wc)
            << " cos " << fmt(last.cos) << " kd " << fmt(last.kd) << " total " << fmt(last.total)
            << ", train accuracy " << fmt(run.trace.epoch_accuracy.back()) << "\n";
        out << "wrote " << tr_out << "\n";
        return kExitOk;
    }
    if (c_ev->parsed()) {
        const auto in_data = load_inputs(ev);
        const auto ckpt = store::load_checkpoint(ev_ckpt, in_data.backbone.encoder.hash());
        FeatureDataset test;
        if (in_data.test) {
            test = *in_data.test;
        } else if (ev_all) {
            test = in_data.pool;
        } else {
            const auto split = sample_few_shot(in_data.pool, ckpt.meta.shots, ckpt.meta.seed);
            test = select_items(in_data.pool, split.test_ids);
        }
        auto r = evaluate(in_data.backbone, ckpt.table, ckpt.context ? &*ckpt.context : nullptr, test);
        r.seeds = {ckpt.meta.seed};
        out << "accuracy " << fmt(r.accuracy) << " (" << r.n << " items)\n";
        write_if(ev_out, store::eval_report_json(r));
        return kExitOk;
    }
    if (c_sw->parsed()) {
        const auto tc = swo.config();
        const auto seeds = parse_u64_list(sw_seeds, "seed");
        std::vector<std::size_t> shots;
        for (auto s : parse_u64_list(sw_shots, "shot")) shots.push_back(static_cast<std::size_t>(s));
        const auto in_data = load_inputs(sw);
        const auto r = few_shot_sweep(in_data.backbone, in_data.pool, tc, shots, seeds,
                                      in_data.test ? &*in_data.test : nullptr);
        for (const auto& row : r.rows) out << "shots " << row.shots << " mean accuracy " << fmt(row.mean) << "\n";
        write_if(sw_out, store::sweep_json(r));
        write_if(sw_csv, store::sweep_csv(r));
        return kExitOk;
    }
    if (c_ab->parsed()) {
        const auto tc = abo.config();
        const auto seeds = parse_u64_list(ab_seeds, "seed");
        const auto in_data = load_inputs(ab);
        const auto rows = run_ablation(in_data.backbone, in_data.pool, tc, seeds, in_data.test ? &*in_data.test : nullptr);
        for (const auto& r : rows)
            out << "wc " << r.wc << " cos " << r.cos << " kd " << r.kd << " accuracy " << fmt(r.accuracy) << "\n";
        write_if(ab_out, store::ablation_json(rows, seeds));
        write_if(ab_csv, store::ablation_csv(rows));
        return kExitOk;
    }
    if (c_in->parsed()) {
        IncrementalConfig ic;
        ic.train = ino.config();
        ic.mode = in_mode == "coop" ? IncrementalMode::coop : IncrementalMode::lamm;
        ic.joint_softmax = in_joint;
        const auto in_data = load_inputs(in);
        const auto [set1, set2] = default_incremental_split(in_data.pool.categories.size());
        const auto r = run_incremental(in_data.backbone, in_data.pool, set1, set2, ic);
        out << "set1 before " << fmt(r.acc_set1_before) << " set2 " << fmt(r.acc_set2) << " set1 after "
            << fmt(r.acc_set1_after) << " degradation " << fmt(r.degradation) << "\n";
        write_if(in_out, store::incremental_report_json(r, ic.mode));
        return kExitOk;
    }
    if (c_ds->parsed()) {
        const auto in_data = load_inputs(ds);
        const auto ckpt = store::load_checkpoint(ds_ckpt, in_data.backbone.encoder.hash());
        const auto alt = store::load_features(ds_alt);
        auto r = domain_shift_eval(in_data.backbone, ckpt.table, ckpt.context ? &*ckpt.context : nullptr,
                                   in_data.pool.categories, alt);
        r.seeds = {ckpt.meta.seed};
        out << "shifted accuracy " << fmt(r.accuracy) << " (" << r.n << " items)\n";
        write_if(ds_out, store::eval_report_json(r));
        return kExitOk;
    }
    if (c_val->parsed()) {
        for (const auto& p : val_paths) out << p << ": " << store::validate_file(p) << "\n";
        return kExitOk;
    }
    return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace lamm
