#pragma once

#include <json.hpp>

#include "hcolc/analysis.hpp"

namespace hcolc::surface {

enum class Language : uint8_t { Hcol, Shcol, Mshcol, Dhcol };

Result<Language> language_from_name(std::string_view name);

struct Parsed {
  Language lang = Language::Hcol;
  hcol::HExprPtr h;
  sigma::SHExprPtr sh;
  mshcol::MSHExprPtr msh;
  dhcol::DshPtr dsh;
};

// S-expression surface syntax, one grammar per language.
Result<Parsed> parse_program(std::string_view text, Language lang);

// carrier literal lists like "1 2/3 -0.5 0x1.8p1"
Result<std::vector<CarrierValue>> parse_values(std::string_view text, CarrierKind kind);

std::string print_program(const Parsed& p);

// ---- JSON dumps -------------------------------------------------------------

nlohmann::json to_json(const hcol::HExprPtr& e);
nlohmann::json to_json(const sigma::SHExprPtr& e);
nlohmann::json to_json(const mshcol::MSHExprPtr& e);
nlohmann::json to_json(const dhcol::DshPtr& e);
nlohmann::json to_json(const mshcol::MemBlock& b);
nlohmann::json to_json(const mshcol::Memory& m);
nlohmann::json program_json(const Parsed& p);

}  // namespace hcolc::surface
