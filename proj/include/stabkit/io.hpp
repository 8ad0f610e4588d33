#pragma once

#include <string>

#include "stabkit/synthesis.hpp"
#include "stabkit/verify.hpp"

namespace stabkit {

// 17 significant digits, matching across runs bit-for-bit.
std::string format_g17(double v);

// Solved rows only, in shell order.
// header: y1..yn,x1..xn,u1..um,residual
std::string to_csv(const SectionTable& table);
// header: x1..xn,u1..um,residual
std::string to_csv(const FeedbackTable& table);
// header: x1..xn,hx1..hxn,hu1..hum,residual
std::string to_csv(const SymbolTable& table);
// header: t,x1..xn
std::string to_csv(const Trajectory& traj);

void write_file(const std::string& path, const std::string& content);

}  // namespace stabkit
