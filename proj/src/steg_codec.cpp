#include "wipad/steg_codec.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

namespace wipad {

CapacityError::CapacityError(std::int64_t needed_bits, std::int64_t available_bits)
    : std::runtime_error("covert capacity exceeded: need " +
                         std::to_string(needed_bits) + " bits, have " +
                         std::to_string(available_bits)),
      needed_(needed_bits),
      available_(available_bits) {}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes) {
    BitString bs;
    bs.bytes_.assign(bytes.begin(), bytes.end());
    bs.nbits_ = 8 * bytes.size();
    return bs;
}

BitString BitString::from_packed(std::span<const std::uint8_t> bytes,
                                 std::size_t nbits) {
    if (nbits > 8 * bytes.size()) {
        throw std::invalid_argument("BitString::from_packed: buffer too short");
    }
    BitString bs;
    bs.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((nbits + 7) / 8));
    bs.nbits_ = nbits;
    if (nbits % 8 != 0 && !bs.bytes_.empty()) {
        // keep the tail canonical so equality stays bitwise
        bs.bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - nbits % 8));
    }
    return bs;
}

void BitString::push_back(bool bit) {
    if (nbits_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80 >> (nbits_ % 8));
    ++nbits_;
}

void BitString::append(const BitString& other) {
    if (&other == this) {
        const BitString copy = other;
        append(copy);
        return;
    }
    if (nbits_ % 8 == 0) {
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
        nbits_ += other.nbits_;
        return;
    }
    for (std::size_t i = 0; i < other.nbits_; ++i) push_back(other.bit(i));
}

bool BitString::bit(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("BitString::bit: index out of range");
    return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

bool BitString::any() const {
    return std::any_of(bytes_.begin(), bytes_.end(),
                       [](std::uint8_t b) { return b != 0; });
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
    if (pos + len > nbits_) throw std::out_of_range("BitString::slice: out of range");
    BitString out;
    if (pos % 8 == 0) {
        return from_packed(std::span(bytes_).subspan(pos / 8), len);
    }
    for (std::size_t i = 0; i < len; ++i) out.push_back(bit(pos + i));
    return out;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    if (nbits_ % 8 != 0) {
        throw std::logic_error("BitString::to_bytes: size is not a whole number of bytes");
    }
    return bytes_;
}

BitString FrameBits::to_bit_layout() const {
    BitString out;
    for (int i = 0; i < kServiceBits; ++i) out.push_back(false);
    out.append(BitString::from_bytes(psdu));
    for (int i = 0; i < kTailBits; ++i) out.push_back(false);
    out.append(pad);
    return out;
}

FrameBits build_frame(std::span<const std::uint8_t> psdu, const PhyRate& rate,
                      const BitString& covert_bits) {
    const std::int64_t capacity =
        pad_capacity_bits(static_cast<std::int64_t>(psdu.size()), rate);
    if (static_cast<std::int64_t>(covert_bits.size()) > capacity) {
        throw CapacityError(static_cast<std::int64_t>(covert_bits.size()), capacity);
    }
    FrameBits frame{rate, {psdu.begin(), psdu.end()}, covert_bits};
    while (static_cast<std::int64_t>(frame.pad.size()) < capacity) {
        frame.pad.push_back(false);
    }
    return frame;
}

BitString extract(const FrameBits& frame, const PhyRate& rate,
                  std::int64_t covert_len_bits) {
    (void)rate;  // pad length is already fixed by the frame
    if (covert_len_bits < 0 ||
        covert_len_bits > static_cast<std::int64_t>(frame.pad.size())) {
        throw CapacityError(covert_len_bits,
                            static_cast<std::int64_t>(frame.pad.size()));
    }
    return frame.pad.slice(0, static_cast<std::size_t>(covert_len_bits));
}

bool zero_pad_check(const FrameBits& frame) { return !frame.pad.any(); }

std::vector<BitString> chunk_message(std::span<const std::uint8_t> payload,
                                     std::span<const std::int64_t> capacities) {
    if (payload.size() > 0xFFFF) {
        throw std::invalid_argument("chunk_message: payload above 65535 bytes");
    }
    // 16-bit big-endian byte count, then the payload bits
    BitString stream;
    const auto len = static_cast<std::uint16_t>(payload.size());
    const std::uint8_t prefix[2] = {static_cast<std::uint8_t>(len >> 8),
                                    static_cast<std::uint8_t>(len & 0xFF)};
    stream.append(BitString::from_bytes(prefix));
    stream.append(BitString::from_bytes(payload));

    std::int64_t total_capacity = 0;
    for (const std::int64_t c : capacities) {
        if (c < 0) throw std::invalid_argument("chunk_message: negative capacity");
        total_capacity += c;
    }
    if (total_capacity < static_cast<std::int64_t>(stream.size())) {
        throw CapacityError(static_cast<std::int64_t>(stream.size()), total_capacity);
    }

    std::vector<BitString> chunks;
    chunks.reserve(capacities.size());
    std::size_t pos = 0;
    for (const std::int64_t c : capacities) {
        const std::size_t take =
            std::min<std::size_t>(static_cast<std::size_t>(c), stream.size() - pos);
        chunks.push_back(stream.slice(pos, take));
        pos += take;
    }
    return chunks;
}

std::vector<std::uint8_t> reassemble(std::span<const BitString> chunks) {
    MessageAssembler assembler;
    for (const auto& chunk : chunks) assembler.add_chunk(chunk);
    return assembler.message();
}

void MessageAssembler::add_chunk(const BitString& chunk) { bits_.append(chunk); }

bool MessageAssembler::complete() const {
    if (bits_.size() < 16) return false;
    const std::size_t len =
        (static_cast<std::size_t>(bits_.packed()[0]) << 8) | bits_.packed()[1];
    return bits_.size() >= 16 + 8 * len;
}

std::vector<std::uint8_t> MessageAssembler::message() const {
    if (!complete()) {
        throw std::runtime_error("reassemble: message incomplete (" +
                                 std::to_string(bits_.size()) + " bits so far)");
    }
    const std::size_t len =
        (static_cast<std::size_t>(bits_.packed()[0]) << 8) | bits_.packed()[1];
    return bits_.slice(16, 8 * len).to_bytes();
}

namespace {

int rate_index(const PhyRate& rate) {
    const auto table = rate_table();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] == rate) return static_cast<int>(i);
    }
    throw std::invalid_argument("frame dump: rate is not a rate-table row");
}

void put_u16_be(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(bytes, 2);
}

}  // namespace

void write_frame_dump(std::ostream& out, std::span<const FrameBits> frames) {
    for (const auto& frame : frames) {
        if (frame.psdu.size() > 0xFFFF) {
            throw std::invalid_argument("frame dump: PSDU above 65535 octets");
        }
        const char idx = static_cast<char>(rate_index(frame.rate));
        out.write(&idx, 1);
        put_u16_be(out, static_cast<std::uint16_t>(frame.psdu.size()));
        out.write(reinterpret_cast<const char*>(frame.psdu.data()),
                  static_cast<std::streamsize>(frame.psdu.size()));
        const auto& pad = frame.pad.packed();
        out.write(reinterpret_cast<const char*>(pad.data()),
                  static_cast<std::streamsize>(pad.size()));
    }
    if (!out) throw std::runtime_error("frame dump: write failed");
}

std::vector<FrameBits> read_frame_dump(std::istream& in) {
    std::vector<FrameBits> frames;
    for (;;) {
        const int idx = in.get();
        if (idx == std::istream::traits_type::eof()) break;
        const auto table = rate_table();
        if (idx < 0 || static_cast<std::size_t>(idx) >= table.size()) {
            throw std::runtime_error("frame dump: bad rate index " + std::to_string(idx));
        }
        const PhyRate rate = table[static_cast<std::size_t>(idx)];

        std::uint8_t len_be[2];
        if (!in.read(reinterpret_cast<char*>(len_be), 2)) {
            throw std::runtime_error("frame dump: truncated record header");
        }
        const std::size_t psdu_len = (static_cast<std::size_t>(len_be[0]) << 8) | len_be[1];

        std::vector<std::uint8_t> psdu(psdu_len);
        if (psdu_len > 0 &&
            !in.read(reinterpret_cast<char*>(psdu.data()),
                     static_cast<std::streamsize>(psdu_len))) {
            throw std::runtime_error("frame dump: truncated PSDU");
        }

        const std::int64_t pad_bits =
            pad_capacity_bits(static_cast<std::int64_t>(psdu_len), rate);
        std::vector<std::uint8_t> pad_bytes(static_cast<std::size_t>((pad_bits + 7) / 8));
        if (!pad_bytes.empty() &&
            !in.read(reinterpret_cast<char*>(pad_bytes.data()),
                     static_cast<std::streamsize>(pad_bytes.size()))) {
            throw std::runtime_error("frame dump: truncated pad region");
        }
        frames.push_back(FrameBits{
            rate, std::move(psdu),
            BitString::from_packed(pad_bytes, static_cast<std::size_t>(pad_bits))});
    }
    return frames;
}

}  // namespace wipad
