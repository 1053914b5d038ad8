// SPDX-License-Identifier: Apache-2.0

#include "lamm/prompting/vocabulary.hpp"

#include <random>
#include <sstream>

#include "lamm/errors.hpp"

namespace lamm {

Vocabulary::Vocabulary(std::vector<std::string> tokens, num::Tensor embeddings)
    : tokens_(std::move(tokens)), embeddings_(std::move(embeddings)) {
    if (embeddings_.rank() != 2 || embeddings_.rows() != tokens_.size()) {
        throw DataError("vocabulary matrix " + num::shape_str(embeddings_.shape()) + " does not match " +
                        std::to_string(tokens_.size()) + " tokens");
    }
    if (embeddings_.cols() == 0) throw DataError("vocabulary has d_model = 0");
    embeddings_.set_requires_grad(false);
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        const auto& t = tokens_[i];
        if (t.empty()) throw DataError("vocabulary token " + std::to_string(i) + " is empty");
        if (t.find_first_of(" \t\r\n") != std::string::npos) throw DataError("vocabulary token '" + t + "' contains whitespace");
        if (!index_.emplace(t, i).second) throw DataError("duplicate vocabulary token '" + t + "'");
    }
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Vocabulary::id(std::string_view token) const {
    if (auto i = find(token)) return *i;
    throw TokenizationError("unknown token '" + std::string(token) + "'");
}

std::vector<std::size_t> Vocabulary::tokenize(std::string_view text) const {
    std::vector<std::size_t> ids;
    std::vector<std::string> unknown;
    for (const auto& w : split_whitespace(text)) {
        if (auto i = find(w))
            ids.push_back(*i);
        else
            unknown.push_back(w);
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& w : unknown) list += (list.empty() ? "" : ", ") + ("'" + w + "'");
        throw TokenizationError("unknown words in \"" + std::string(text) + "\": " + list);
    }
    return ids;
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = num::content_hash(embeddings_);
    for (const auto& t : tokens_)
        for (unsigned char c : t) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    return h;
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream is{std::string(text)};
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<std::string> bundled_words() {
    return {"a",     "photo", "of",    ".",     "the",    "an",    "picture", "image", "small",
            "large", "good",  "bad",   "close", "up",     "dark",  "bright",  "clean", "dirty",
            "big",   "one",   "my",    "this",  "that",   "in",    "on",      "with",  "and",
            "art",   "toy",   "sketch", "blurry", "cropped", "rendering", "origami", "tattoo", "embroidered"};
}

std::vector<std::string> synthetic_category_names(std::size_t count) {
    static const std::vector<std::string> stock = {
        "llama",  "zebra",  "otter",  "falcon", "walrus", "beetle", "heron",   "lynx",   "moose",  "panda",
        "koala",  "bison",  "camel",  "eagle",  "gecko",  "hyena",  "ibis",    "jackal", "lemur",  "marmot",
        "newt",   "ocelot", "puffin", "quail",  "raven",  "salmon", "tapir",   "urchin", "viper",  "wombat",
        "yak",    "badger", "cobra",  "dingo",  "egret",  "ferret", "gazelle", "hornet", "iguana", "jaguar"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(i < stock.size() ? stock[i] : "category" + std::to_string(i));
    return out;
}

Vocabulary make_seeded_vocabulary(std::vector<std::string> words, std::size_t d_model, std::uint64_t seed) {
    if (d_model == 0) throw ConfigError("d_model must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.02);
    num::Tensor emb({words.size(), d_model});
    for (auto& v : emb.data()) v = normal(rng);
    return Vocabulary(std::move(words), std::move(emb));
}

}  // namespace lamm
