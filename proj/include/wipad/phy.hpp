#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace wipad {

enum class Modulation { Bpsk, Qpsk, Qam16, Qam64 };

std::string_view to_string(Modulation mod);

/// One row of the 802.11a/g OFDM rate set.
struct PhyRate {
    int rate_mbps;
    Modulation modulation;
    int code_rate_num;
    int code_rate_den;
    int bits_per_symbol;

    friend bool operator==(const PhyRate&, const PhyRate&) = default;
};

// Fixed PHY geometry for ERP-OFDM.
inline constexpr double kSymbolDurationUs = 4.0;
inline constexpr int kServiceBits = 16;
inline constexpr int kTailBits = 6;
inline constexpr int kPhyFixedBits = kServiceBits + kTailBits;

/// Default ACK frame length in octets (frame control + duration + RA + FCS).
inline constexpr int kAckOctets = 14;

/// The eight OFDM rates, ascending by data rate.
std::span<const PhyRate> rate_table();

/// Table lookup by data rate; nullopt if the rate is not part of the set.
std::optional<PhyRate> find_rate(int rate_mbps);

/// Number of OFDM symbols needed to carry total_bits at the given rate.
std::int64_t symbols_for(std::int64_t total_bits, const PhyRate& rate);

/// On-air duration of the DATA portion of a PPDU carrying a frame of
/// frame_octets (SERVICE and TAIL included, PLCP preamble/header excluded).
/// Applies to data frames and ACKs alike. signal_extension_us adds a fixed
/// trailing time when modelling modes that require it; it does not change
/// the symbol count.
double airtime_us(std::int64_t frame_octets, const PhyRate& rate,
                  double signal_extension_us = 0.0);

/// Number of pad bits filling the last OFDM symbol of a frame of
/// frame_octets. Always in [0, bits_per_symbol).
std::int64_t pad_capacity_bits(std::int64_t frame_octets, const PhyRate& rate);

/// Frame length in octets whose padding is simultaneously maximal
/// (bits_per_symbol - 6 bits) at every rate of the table: 216*alpha - 2.
std::int64_t max_pad_frame_length(int alpha);

/// Bit geometry of one PPDU DATA field.
struct PpduDataField {
    std::int64_t service_bits;
    std::int64_t tail_bits;
    std::int64_t psdu_bits;
    std::int64_t n_symbols;
    std::int64_t pad_bits;

    std::int64_t total_bits() const {
        return service_bits + psdu_bits + tail_bits + pad_bits;
    }
};

PpduDataField ppdu_layout(std::int64_t frame_octets, const PhyRate& rate);

}  // namespace wipad
