#ifndef RACH_SCHEME_H
#define RACH_SCHEME_H

#include <array>
#include <optional>
#include <string_view>

namespace rach {

enum class SchemeKind { FourStep, FourStepSDT, TwoStep, TwoStepSDT };

enum class ReceiverModel { Advanced, Basic };

inline constexpr std::array<SchemeKind, 4> kAllSchemes = {
    SchemeKind::FourStep, SchemeKind::FourStepSDT, SchemeKind::TwoStep, SchemeKind::TwoStepSDT};

inline constexpr std::array<ReceiverModel, 2> kAllReceivers = {
    ReceiverModel::Advanced, ReceiverModel::Basic};

/// Data rides the contention message (no separate HARQ stage on the main path).
constexpr bool carries_data(SchemeKind s)
{
    return s == SchemeKind::FourStepSDT || s == SchemeKind::TwoStepSDT;
}

/// Grant-free schemes with fallback to a 4-step Msg3.
constexpr bool is_two_step(SchemeKind s)
{
    return s == SchemeKind::TwoStep || s == SchemeKind::TwoStepSDT;
}

std::string_view to_string(SchemeKind s);
std::string_view to_string(ReceiverModel r);

/// Accepts "4step", "4stepSDT", "2step", "2stepSDT" (case-insensitive).
std::optional<SchemeKind> parse_scheme(std::string_view s);
std::optional<ReceiverModel> parse_receiver(std::string_view s);

} // namespace rach

#endif
