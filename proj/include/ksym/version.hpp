#pragma once

namespace ksym {

inline constexpr const char* version = "0.1.0";

}
