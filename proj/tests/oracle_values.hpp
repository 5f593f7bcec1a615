#pragma once
// Generated by tests/oracles/derive.py; do not edit.

namespace oracle {

inline constexpr unsigned kPhilox0[10] = {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u, 0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};  // ctr[4], key[2], out[4]
inline constexpr unsigned kPhilox1[10] = {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu, 0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};  // ctr[4], key[2], out[4]
inline constexpr unsigned kPhilox2[10] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u, 0xa4093822u, 0x299f31d0u, 0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u};  // ctr[4], key[2], out[4]
inline constexpr double kInt_e2_e3 = 0.0;
inline constexpr double kNorm4_e1 = 1.1066819197003215924;
inline constexpr double kNorm6_e1 = 1.16499305075071297;
inline constexpr double kVWeight_e1 = 4.1555863184244906519;
inline constexpr double kDrift_e1_mode2 = 2.2214414690791831235;
inline constexpr double kDrift_e1_mode1 = 0.0;
inline constexpr double kDrift_e1_mode3 = 0.0;
inline constexpr double kPairing_h2_x1 = -4.442882938158366247;
inline constexpr double kPairing_h1_x1 = 0.0;
inline constexpr double kPairing_h12_x1half = -0.55536036726979578088;
inline constexpr double kPairing_h1m2_x1 = 1.421722540210677199;
inline constexpr double kQt_e1_inf = 0.050660591821168885722;
inline constexpr double kQt_e1_t01 = 0.043623271605605437549;
inline constexpr double kQt_e1e3_t02 = 0.055311984342532772629;
inline constexpr double kOu_h1_x1_t02_re = 0.96606819130140525505;
inline constexpr double kOu_h1_x1_t02_im = 0.13506751469763602075;
inline constexpr double kOu_mixed_t005_re = 0.97636458926400672323;
inline constexpr double kOu_mixed_t005_im = 0.11148742777257231471;
inline constexpr double kL0_h1_x1_re = 8.0348345821149423279;
inline constexpr double kL0_h1_x1_im = -5.7533055083188688017;

}  // namespace oracle
