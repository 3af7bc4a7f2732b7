#include "wipad/phy.hpp"

#include <array>
#include <stdexcept>

namespace wipad {

namespace {

constexpr std::array<PhyRate, 8> kRateTable{{
    {6, Modulation::Bpsk, 1, 2, 24},
    {9, Modulation::Bpsk, 3, 4, 36},
    {12, Modulation::Qpsk, 1, 2, 48},
    {18, Modulation::Qpsk, 3, 4, 72},
    {24, Modulation::Qam16, 1, 2, 96},
    {36, Modulation::Qam16, 3, 4, 144},
    {48, Modulation::Qam64, 3, 4, 192},
    {54, Modulation::Qam64, 3, 4, 216},
}};

void check_rate(const PhyRate& rate) {
    if (rate.bits_per_symbol <= 0) {
        throw std::invalid_argument("PhyRate: bits_per_symbol must be positive");
    }
}

}  // namespace

std::string_view to_string(Modulation mod) {
    switch (mod) {
        case Modulation::Bpsk: return "BPSK";
        case Modulation::Qpsk: return "QPSK";
        case Modulation::Qam16: return "16-QAM";
        case Modulation::Qam64: return "64-QAM";
    }
    return "?";
}

std::span<const PhyRate> rate_table() { return kRateTable; }

std::optional<PhyRate> find_rate(int rate_mbps) {
    for (const auto& row : kRateTable) {
        if (row.rate_mbps == rate_mbps) return row;
    }
    return std::nullopt;
}

std::int64_t symbols_for(std::int64_t total_bits, const PhyRate& rate) {
    check_rate(rate);
    if (total_bits < 0) {
        throw std::invalid_argument("symbols_for: total_bits must be non-negative");
    }
    return (total_bits + rate.bits_per_symbol - 1) / rate.bits_per_symbol;
}

double airtime_us(std::int64_t frame_octets, const PhyRate& rate,
                  double signal_extension_us) {
    if (frame_octets < 0) {
        throw std::invalid_argument("airtime_us: frame_octets must be non-negative");
    }
    const auto symbols = symbols_for(kPhyFixedBits + 8 * frame_octets, rate);
    return kSymbolDurationUs * static_cast<double>(symbols) + signal_extension_us;
}

std::int64_t pad_capacity_bits(std::int64_t frame_octets, const PhyRate& rate) {
    if (frame_octets < 0) {
        throw std::invalid_argument("pad_capacity_bits: frame_octets must be non-negative");
    }
    const std::int64_t bits = kPhyFixedBits + 8 * frame_octets;
    return rate.bits_per_symbol * symbols_for(bits, rate) - bits;
}

std::int64_t max_pad_frame_length(int alpha) {
    if (alpha < 1) {
        throw std::invalid_argument("max_pad_frame_length: alpha must be >= 1");
    }
    return 216LL * alpha - 2;
}

PpduDataField ppdu_layout(std::int64_t frame_octets, const PhyRate& rate) {
    const std::int64_t psdu_bits = 8 * frame_octets;
    const auto symbols = symbols_for(kPhyFixedBits + psdu_bits, rate);
    return PpduDataField{
        .service_bits = kServiceBits,
        .tail_bits = kTailBits,
        .psdu_bits = psdu_bits,
        .n_symbols = symbols,
        .pad_bits = rate.bits_per_symbol * symbols - (kPhyFixedBits + psdu_bits),
    };
}

}  // namespace wipad
