// SPDX-License-Identifier: Apache-2.0
//
// Little-endian byte buffers. Readers report the byte offset of any
// truncation or malformed field.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lamm::store {

using Bytes = std::vector<std::uint8_t>;

class ByteWriter {
public:
    void put_magic(std::string_view magic);
    void put_u32(std::uint32_t v);
    void put_u64(std::uint64_t v);
    void put_f32(double v);  // rounds to nearest float; non-finite values are a NumericError
    void put_string(std::string_view s);  // u32 length prefix
    void put_raw(std::string_view s);

    std::size_t size() const noexcept { return bytes_.size(); }
    const Bytes& bytes() const noexcept { return bytes_; }
    Bytes take() { return std::move(bytes_); }

private:
    Bytes bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    /// Throws FormatError when the next bytes differ from `magic`.
    void expect_magic(std::string_view magic, std::string_view what);
    std::uint32_t u32(std::string_view field);
    std::uint64_t u64(std::string_view field);
    double f32(std::string_view field);
    std::string string(std::string_view field);
    std::string raw(std::size_t n, std::string_view field);

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    void seek(std::size_t pos);

private:
    void need(std::size_t n, std::string_view field) const;

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

/// Whole-file read; DataError when the file cannot be opened.
Bytes read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace lamm::store
