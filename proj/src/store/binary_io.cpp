// SPDX-License-Identifier: Apache-2.0

#include "lamm/store/binary_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <system_error>

#include "lamm/errors.hpp"

namespace lamm::store {

void ByteWriter::put_magic(std::string_view magic) { put_raw(magic); }

void ByteWriter::put_u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f32(double v) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw NumericError("cannot store non-finite value " + std::to_string(v) + " as f32");
    put_u32(std::bit_cast<std::uint32_t>(f));
}

void ByteWriter::put_string(std::string_view s) {
    if (s.size() > UINT32_MAX) throw UsageError("string too long to store");
    put_u32(static_cast<std::uint32_t>(s.size()));
    put_raw(s);
}

void ByteWriter::put_raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

void ByteReader::need(std::size_t n, std::string_view field) const {
    if (n > remaining()) {
        throw FormatError(pos_, "truncated " + std::string(field) + ": need " + std::to_string(n) + " bytes, " +
                                    std::to_string(remaining()) + " left");
    }
}

void ByteReader::expect_magic(std::string_view magic, std::string_view what) {
    need(magic.size(), "magic");
    for (std::size_t i = 0; i < magic.size(); ++i) {
        if (bytes_[pos_ + i] != static_cast<std::uint8_t>(magic[i]))
            throw FormatError(pos_, "bad magic, not a " + std::string(what));
    }
    pos_ += magic.size();
}

std::uint32_t ByteReader::u32(std::string_view field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64(std::string_view field) {
    need(8, field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

double ByteReader::f32(std::string_view field) {
    const auto at = pos_;
    const float f = std::bit_cast<float>(u32(field));
    if (!std::isfinite(f)) throw FormatError(at, "non-finite value in " + std::string(field));
    return static_cast<double>(f);
}

std::string ByteReader::string(std::string_view field) {
    const auto n = u32(field);
    return raw(n, field);
}

std::string ByteReader::raw(std::size_t n, std::string_view field) {
    need(n, field);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
}

void ByteReader::seek(std::size_t pos) {
    if (pos > bytes_.size()) throw FormatError(pos_, "seek past end of data");
    pos_ = pos;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write '" + tmp.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace lamm::store
