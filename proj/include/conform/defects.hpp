#pragma once

// Fixed, enumerable catalog of non-conformances the simulator can exhibit.
//
// Textual form (CLI flags and plan files): NAME[:params]
//   DAC_GRANT_EXTRA:S,O,R      DAC_DENY_GRANTED:S,O,R
//   MAC_ALLOW_READ_UP          MAC_ALLOW_WRITE_DOWN
//   MEM_NO_WIPE:AREA           ISOLATION_LEAK          REAL_MEM_EXPOSED
//   AUTH_ACCEPT_ANY_PASSWORD   AUTH_REJECT_VALID
//   INTEGRITY_MISS:GLOB        INTEGRITY_FALSE_ALARM:GLOB
//   AUDIT_DROP_EVENTS:FRACTION

#include <array>
#include <compare>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "conform/errors.hpp"

namespace conform {

enum class DefectKind {
  DacGrantExtra,
  DacDenyGranted,
  MacAllowReadUp,
  MacAllowWriteDown,
  MemNoWipe,
  IsolationLeak,
  RealMemExposed,
  AuthAcceptAnyPassword,
  AuthRejectValid,
  IntegrityMiss,
  IntegrityFalseAlarm,
  AuditDropEvents,
};

inline constexpr std::array<std::pair<DefectKind, std::string_view>, 12>
    kDefectNames{{
        {DefectKind::DacGrantExtra, "DAC_GRANT_EXTRA"},
        {DefectKind::DacDenyGranted, "DAC_DENY_GRANTED"},
        {DefectKind::MacAllowReadUp, "MAC_ALLOW_READ_UP"},
        {DefectKind::MacAllowWriteDown, "MAC_ALLOW_WRITE_DOWN"},
        {DefectKind::MemNoWipe, "MEM_NO_WIPE"},
        {DefectKind::IsolationLeak, "ISOLATION_LEAK"},
        {DefectKind::RealMemExposed, "REAL_MEM_EXPOSED"},
        {DefectKind::AuthAcceptAnyPassword, "AUTH_ACCEPT_ANY_PASSWORD"},
        {DefectKind::AuthRejectValid, "AUTH_REJECT_VALID"},
        {DefectKind::IntegrityMiss, "INTEGRITY_MISS"},
        {DefectKind::IntegrityFalseAlarm, "INTEGRITY_FALSE_ALARM"},
        {DefectKind::AuditDropEvents, "AUDIT_DROP_EVENTS"},
    }};

inline std::string_view to_string(DefectKind k) {
  for (const auto& [kind, name] : kDefectNames)
    if (kind == k) return name;
  return "?";
}

struct Defect {
  DefectKind kind{};
  // DAC triple, area id, or file glob depending on kind; unused ones empty.
  std::string subject;
  std::string object;
  std::string right;
  std::string area;
  std::string pattern;
  double fraction = 0.0;

  static Defect dac_grant_extra(std::string s, std::string o, std::string r) {
    return {DefectKind::DacGrantExtra, std::move(s), std::move(o),
            std::move(r), {}, {}, 0.0};
  }
  static Defect dac_deny_granted(std::string s, std::string o, std::string r) {
    return {DefectKind::DacDenyGranted, std::move(s), std::move(o),
            std::move(r), {}, {}, 0.0};
  }
  static Defect mem_no_wipe(std::string area) {
    Defect d;
    d.kind = DefectKind::MemNoWipe;
    d.area = std::move(area);
    return d;
  }
  static Defect integrity_miss(std::string glob) {
    Defect d;
    d.kind = DefectKind::IntegrityMiss;
    d.pattern = std::move(glob);
    return d;
  }
  static Defect integrity_false_alarm(std::string glob) {
    Defect d;
    d.kind = DefectKind::IntegrityFalseAlarm;
    d.pattern = std::move(glob);
    return d;
  }
  static Defect audit_drop_events(double fraction) {
    Defect d;
    d.kind = DefectKind::AuditDropEvents;
    d.fraction = fraction;
    return d;
  }
  static Defect simple(DefectKind k) {
    Defect d;
    d.kind = k;
    return d;
  }

  friend auto operator<=>(const Defect&, const Defect&) = default;
};

using DefectSet = std::set<Defect>;

namespace detail {
inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(std::move(cur));
  return parts;
}
}  // namespace detail

inline Defect parse_defect(std::string_view text) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  const std::string_view params =
      colon == std::string_view::npos ? std::string_view{}
                                      : text.substr(colon + 1);
  const DefectKind* kind = nullptr;
  for (const auto& entry : kDefectNames)
    if (entry.second == name) kind = &entry.first;
  if (kind == nullptr)
    throw DefectParseError("unknown defect '" + std::string(name) + "'");

  auto fail = [&](std::string_view why) {
    return DefectParseError("defect '" + std::string(text) + "': " +
                            std::string(why));
  };

  switch (*kind) {
    case DefectKind::DacGrantExtra:
    case DefectKind::DacDenyGranted: {
      auto p = detail::split(params, ',');
      if (p.size() != 3 || p[0].empty() || p[1].empty() || p[2].empty())
        throw fail("expects SUBJECT,OBJECT,RIGHT");
      return *kind == DefectKind::DacGrantExtra
                 ? Defect::dac_grant_extra(p[0], p[1], p[2])
                 : Defect::dac_deny_granted(p[0], p[1], p[2]);
    }
    case DefectKind::MemNoWipe:
      if (params.empty()) throw fail("expects an area id");
      return Defect::mem_no_wipe(std::string(params));
    case DefectKind::IntegrityMiss:
    case DefectKind::IntegrityFalseAlarm:
      if (params.empty()) throw fail("expects a file pattern");
      return *kind == DefectKind::IntegrityMiss
                 ? Defect::integrity_miss(std::string(params))
                 : Defect::integrity_false_alarm(std::string(params));
    case DefectKind::AuditDropEvents: {
      double f = 0.0;
      std::istringstream in{std::string(params)};
      if (params.empty() || !(in >> f) || !in.eof() || f < 0.0 || f > 1.0)
        throw fail("expects a fraction in [0,1]");
      return Defect::audit_drop_events(f);
    }
    default:
      if (!params.empty()) throw fail("takes no parameters");
      return Defect::simple(*kind);
  }
}

inline std::string format_defect(const Defect& d) {
  std::string out(to_string(d.kind));
  switch (d.kind) {
    case DefectKind::DacGrantExtra:
    case DefectKind::DacDenyGranted:
      return out + ":" + d.subject + "," + d.object + "," + d.right;
    case DefectKind::MemNoWipe:
      return out + ":" + d.area;
    case DefectKind::IntegrityMiss:
    case DefectKind::IntegrityFalseAlarm:
      return out + ":" + d.pattern;
    case DefectKind::AuditDropEvents: {
      std::ostringstream s;
      s << d.fraction;
      return out + ":" + s.str();
    }
    default:
      return out;
  }
}

}  // namespace conform
