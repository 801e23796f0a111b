#pragma once

// Generated by tests/oracles/generate.py; do not edit.

namespace oracle {

// AnalyticBh(b_sat = 2 T, mu_r_initial = 4000) at B = 1 T.
inline constexpr double kAnalyticH = 3.9758936425314650799e+2;
inline constexpr double kAnalyticMuApp = 2.5151578233951363446e-3;
inline constexpr double kAnalyticMuDiff = 1.2588352348350249489e-3;

// N42-like magnet (1.31 T, mu_r 1.05) over 9 mm.
inline constexpr double kPmMmf9mm = 8.9354132335878381367e+3;

// Cell 50..60 mm, dtheta = 2 pi / 40, mu_r = 1000, stack 0.2 m.
inline constexpr double kTubeRadIn = 2.3091294922346490567e+3;
inline constexpr double kTubeRadOut = 2.3091294922346490567e+3;
inline constexpr double kTubeTan = 1.7140046711709616057e+3;

// Hand network: radii 40/50/56/70 mm, 4 angular layers, stack 0.1 m; loop j * 2 + ring.
// Layer 0 steel (mu_r 1000) except cell 3 (air); layer 1 magnets +, +, -, -; layer 2 air.
inline constexpr double kHandMatrix[8][8] = {
    {1.0565026348743395397e+8, -1.0504632496629030419e+8, -2.7396038483604645243e+5, 0.0, 0.0, 0.0, -2.7396038483604645243e+5, 0.0},
    {-1.0504632496629030419e+8, 1.6274132518614772734e+8, 0.0, -8.3862437415027540641e+5, 0.0, 0.0, 0.0, -8.3862437415027540641e+5},
    {-2.7396038483604645243e+5, 0.0, 1.0565026348743395397e+8, -1.0504632496629030419e+8, -2.7396038483604645243e+5, 0.0, 0.0, 0.0},
    {0.0, -8.3862437415027540641e+5, -1.0504632496629030419e+8, 1.6274132518614772734e+8, 0.0, -8.3862437415027540641e+5, 0.0, 0.0},
    {0.0, 0.0, -2.7396038483604645243e+5, 0.0, 1.3419579433679084066e+8, -1.0504632496629030419e+8, -8.3862437415027540641e+5, 0.0},
    {0.0, 0.0, 0.0, -8.3862437415027540641e+5, -1.0504632496629030419e+8, 1.6274132518614772734e+8, 0.0, -8.3862437415027540641e+5},
    {-2.7396038483604645243e+5, 0.0, 0.0, 0.0, -8.3862437415027540641e+5, 0.0, 1.3419579433679084066e+8, -1.0504632496629030419e+8},
    {0.0, -8.3862437415027540641e+5, 0.0, 0.0, 0.0, -8.3862437415027540641e+5, -1.0504632496629030419e+8, 1.6274132518614772734e+8},
};
inline constexpr double kHandMmf[8] = {0.0, 0.0, 5.7882141942192011521e+3, 6.1256701172312496969e+3, 0.0, 0.0, -5.7882141942192011521e+3, -6.1256701172312496969e+3};
inline constexpr double kHandPhi[8] = {1.824334039680945454e-6, 1.5460132191194377006e-6, 2.574617302926607647e-4, 2.0383618973966546385e-4, -2.0796221270291768016e-7, 2.3420595497494777369e-7, -1.4672175968799886265e-4, -1.3233736916679094998e-4};
inline constexpr double kHandMagnetBrad[4] = {1.7066810217708045835e-2, 2.7772768362613093578e-2, -2.7976712864110865083e-2, -1.6862865716210274331e-2};
inline constexpr double kHandMagnetBtan[4] = {-1.1755058083872004095e-2, 4.4919884477964007164e-2, 4.4319476987764529492e-2, -1.2355465574071481768e-2};

// Base design 1, coarse preset: radial layers per region (inside out) and angular layers.
inline constexpr int kBd1CoarseLayers[10] = {2, 3, 9, 3, 2, 11, 3, 7, 3, 2};
inline constexpr int kBd1CoarseAngular = 560;
inline constexpr int kBd1CoarseCells = 25200;

inline constexpr long kStudyDesigns = 139968;

}  // namespace oracle
