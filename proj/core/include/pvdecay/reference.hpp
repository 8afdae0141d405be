#pragma once

// Values reported for the 2008-2010 English Wikipedia front-page corpus.
// They serve as simulator defaults and documentation; nothing here is a
// reproduction target.
namespace pvdecay::reference {

// All 684 articles.
inline constexpr double kBetaAll = 0.9874;
inline constexpr double kGammaAll = 0.2319;
inline constexpr double kLawMAll = -0.138;
inline constexpr double kLawCAll = 0.863;
inline constexpr double kPearsonAll = -0.29;

// First 100 articles by promotion date (training split).
inline constexpr double kBetaFirst100 = 0.9877;
inline constexpr double kGammaFirst100 = 0.2618;
inline constexpr double kLawMFirst100 = -0.132;
inline constexpr double kLawCFirst100 = 0.862;
inline constexpr double kPearsonFirst100 = -0.25;
inline constexpr int kTrainingArticles = 100;

inline constexpr double kDecyclingFraction = 0.162;
inline constexpr double kV1LogMean = 7.63;
inline constexpr double kV1LogSd = 0.71;
inline constexpr double kFrontPageMeanHourly = 2.5e5;

}  // namespace pvdecay::reference
