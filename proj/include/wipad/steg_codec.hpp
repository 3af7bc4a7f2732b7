#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "wipad/phy.hpp"

namespace wipad {

/// Covert payload does not fit the available pad bits.
class CapacityError : public std::runtime_error {
public:
    CapacityError(std::int64_t needed_bits, std::int64_t available_bits);
    std::int64_t needed_bits() const { return needed_; }
    std::int64_t available_bits() const { return available_; }

private:
    std::int64_t needed_;
    std::int64_t available_;
};

/// A bit sequence stored packed, MSB-first within each byte. Unused bits
/// of the last byte are always zero, so equality is bitwise.
class BitString {
public:
    BitString() = default;

    /// Every bit of the given bytes, MSB-first.
    static BitString from_bytes(std::span<const std::uint8_t> bytes);
    /// The first nbits of a packed MSB-first buffer.
    static BitString from_packed(std::span<const std::uint8_t> bytes,
                                 std::size_t nbits);

    void push_back(bool bit);
    void append(const BitString& other);
    bool bit(std::size_t i) const;

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }
    bool any() const;

    BitString slice(std::size_t pos, std::size_t len) const;

    /// Packed MSB-first bytes, ceil(size/8) of them, zero tail fill.
    const std::vector<std::uint8_t>& packed() const { return bytes_; }
    /// Whole bytes; size() must be a multiple of 8.
    std::vector<std::uint8_t> to_bytes() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

/// The DATA field of one PPDU: 16 zero SERVICE bits, the PSDU, 6 zero TAIL
/// bits, then the pad region filling the last OFDM symbol. SERVICE and
/// TAIL are fixed by construction and never carry covert bits.
struct FrameBits {
    PhyRate rate;
    std::vector<std::uint8_t> psdu;
    BitString pad;

    std::int64_t total_bits() const {
        return kPhyFixedBits + 8 * static_cast<std::int64_t>(psdu.size()) +
               static_cast<std::int64_t>(pad.size());
    }
    std::int64_t n_symbols() const { return total_bits() / rate.bits_per_symbol; }

    /// The whole field as a flat bit sequence (layout checks, serializers).
    BitString to_bit_layout() const;
};

/// Builds a frame whose pad region starts with covert_bits and is zero
/// filled up to the symbol boundary. Throws CapacityError if the covert
/// bits exceed the pad capacity of this frame length and rate.
FrameBits build_frame(std::span<const std::uint8_t> psdu, const PhyRate& rate,
                      const BitString& covert_bits);

/// First covert_len_bits of the pad region. Throws CapacityError when the
/// request exceeds the pad region.
BitString extract(const FrameBits& frame, const PhyRate& rate,
                  std::int64_t covert_len_bits);

/// True iff every pad bit is zero, i.e. the frame is indistinguishable
/// from a standard-compliant one at the padding level.
bool zero_pad_check(const FrameBits& frame);

/// Splits a covert message (16-bit big-endian byte-length prefix followed
/// by the payload bits) greedily across the given per-frame capacities.
/// Returns one chunk per capacity entry; trailing chunks may be empty.
/// Throws CapacityError if the total capacity cannot hold the message and
/// std::invalid_argument for payloads above 65535 bytes.
std::vector<BitString> chunk_message(std::span<const std::uint8_t> payload,
                                     std::span<const std::int64_t> capacities);

/// Inverse of chunk_message over in-order chunks.
std::vector<std::uint8_t> reassemble(std::span<const BitString> chunks);

/// Incremental reassembly; one writer per instance.
class MessageAssembler {
public:
    void add_chunk(const BitString& chunk);
    /// True once the length prefix and the full payload have arrived.
    bool complete() const;
    /// The reassembled payload. Throws std::runtime_error if incomplete.
    std::vector<std::uint8_t> message() const;
    std::size_t bits_received() const { return bits_.size(); }

private:
    BitString bits_;
};

/// Frame-dump record stream. Per record: 1-byte rate index (row of the
/// rate table), 2-byte big-endian PSDU length in octets, the PSDU bytes,
/// then ceil(pad_bits / 8) bytes holding the pad region MSB-first.
void write_frame_dump(std::ostream& out, std::span<const FrameBits> frames);
std::vector<FrameBits> read_frame_dump(std::istream& in);

}  // namespace wipad
