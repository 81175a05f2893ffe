#pragma once

#include <charconv>
#include <string>
#include <type_traits>

namespace slm::detail {

// Number text for error messages. Ten significant digits hide the rounding
// left by lb - d and friends.
template <typename T>
std::string num(T v)
{
    char buf[32];
    std::to_chars_result res;
    if constexpr (std::is_floating_point_v<T>)
        res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
    else
        res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

}  // namespace slm::detail
