#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "privaudit/errors.hpp"

namespace privaudit::detail {

/// Bounds-checked little-endian reader. The error code is configurable so
/// XML chunks report truncated_chunk and DEX reports truncated_file.
class ByteReader {
public:
    ByteReader(std::span<const std::byte> data, errc overflow)
            : data_(data), overflow_(overflow)
    {
    }

    std::size_t offset() const { return offset_; }
    std::size_t size() const { return data_.size(); }
    std::size_t remaining() const { return data_.size() - offset_; }

    void seek(std::size_t offset)
    {
        if (offset > data_.size()) {
            fail(offset);
        }
        offset_ = offset;
    }

    void skip(std::size_t count)
    {
        require(count);
        offset_ += count;
    }

    std::uint8_t u8()
    {
        require(1);
        return static_cast<std::uint8_t>(data_[offset_++]);
    }

    std::uint16_t u16()
    {
        require(2);
        std::uint16_t value = static_cast<std::uint16_t>(
                static_cast<std::uint8_t>(data_[offset_])
                | (static_cast<std::uint8_t>(data_[offset_ + 1]) << 8));
        offset_ += 2;
        return value;
    }

    std::uint32_t u32()
    {
        require(4);
        std::uint32_t value = static_cast<std::uint8_t>(data_[offset_])
                | (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[offset_ + 1])) << 8)
                | (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[offset_ + 2])) << 16)
                | (static_cast<std::uint32_t>(static_cast<std::uint8_t>(data_[offset_ + 3])) << 24);
        offset_ += 4;
        return value;
    }

    std::span<const std::byte> bytes(std::size_t count)
    {
        require(count);
        auto out = data_.subspan(offset_, count);
        offset_ += count;
        return out;
    }

    /// Unsigned LEB128 (DEX). Caps at five bytes.
    std::uint32_t uleb128()
    {
        std::uint32_t result = 0;
        for (int shift = 0; shift < 35; shift += 7) {
            std::uint8_t byte = u8();
            result |= static_cast<std::uint32_t>(byte & 0x7f) << shift;
            if ((byte & 0x80) == 0) {
                return result;
            }
        }
        fail(offset_);
    }

private:
    void require(std::size_t count) const
    {
        if (count > remaining()) {
            fail(offset_);
        }
    }

    [[noreturn]] void fail(std::size_t offset) const
    {
        raise(overflow_, "read past end at offset " + std::to_string(offset) + " (size "
                                 + std::to_string(data_.size()) + ")");
    }

    std::span<const std::byte> data_;
    errc overflow_;
    std::size_t offset_ = 0;
};

} // namespace privaudit::detail
