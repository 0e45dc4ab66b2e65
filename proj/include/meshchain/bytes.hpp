#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meshchain {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

// SHA-256 over a byte span.
Digest sha256(std::span<const uint8_t> data);

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(std::string_view hex);

inline Digest zero_digest() { return Digest{}; }

// Canonical wire encoding shared by the ledger and the harness:
// integers 8-byte big-endian, IEEE doubles as their bit pattern in
// big-endian, byte strings with a 4-byte big-endian length prefix,
// lists with a 4-byte big-endian count prefix, digests raw 32 bytes.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 3; i >= 0; --i) buf_.push_back(uint8_t(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 7; i >= 0; --i) buf_.push_back(uint8_t(v >> (8 * i)));
    }

    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }

    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }

    void bytes(std::span<const uint8_t> v) {
        u32(static_cast<uint32_t>(v.size()));
        buf_.insert(buf_.end(), v.begin(), v.end());
    }

    void str(std::string_view v) {
        u32(static_cast<uint32_t>(v.size()));
        buf_.insert(buf_.end(), v.begin(), v.end());
    }

    void digest(const Digest& d) { buf_.insert(buf_.end(), d.begin(), d.end()); }

    void count(size_t n) { u32(static_cast<uint32_t>(n)); }

    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
        return v;
    }

    int64_t i64() { return static_cast<int64_t>(u64()); }

    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    Bytes bytes() {
        uint32_t n = u32();
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    std::string str() {
        uint32_t n = u32();
        need(n);
        std::string out(reinterpret_cast<const char*>(data_.data()) + pos_, n);
        pos_ += n;
        return out;
    }

    Digest digest() {
        need(32);
        Digest d;
        std::memcpy(d.data(), data_.data() + pos_, 32);
        pos_ += 32;
        return d;
    }

    // Counted elements occupy at least one input byte each, so a count
    // beyond the remaining bytes is malformed; rejecting it here keeps
    // decoders from reserving absurd capacities.
    size_t count() {
        const uint32_t n = u32();
        if (n > remaining()) throw std::runtime_error("byte reader: count exceeds input");
        return n;
    }

    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

private:
    void need(size_t n) {
        if (data_.size() - pos_ < n) throw std::runtime_error("byte reader: truncated input");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace meshchain
