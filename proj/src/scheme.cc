#include "rach/scheme.h"

#include <algorithm>
#include <cctype>
#include <string>

namespace rach {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(SchemeKind s)
{
    switch (s) {
    case SchemeKind::FourStep: return "4step";
    case SchemeKind::FourStepSDT: return "4stepSDT";
    case SchemeKind::TwoStep: return "2step";
    case SchemeKind::TwoStepSDT: return "2stepSDT";
    }
    return "?";
}

std::string_view to_string(ReceiverModel r)
{
    return r == ReceiverModel::Advanced ? "advanced" : "basic";
}

std::optional<SchemeKind> parse_scheme(std::string_view s)
{
    const std::string l = lower(s);
    for (SchemeKind k : kAllSchemes) {
        if (l == lower(to_string(k))) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<ReceiverModel> parse_receiver(std::string_view s)
{
    const std::string l = lower(s);
    if (l == "advanced") {
        return ReceiverModel::Advanced;
    }
    if (l == "basic") {
        return ReceiverModel::Basic;
    }
    return std::nullopt;
}

} // namespace rach
