#pragma once

#include <string>
#include <string_view>

namespace evacsim {

// SHA-1 digest as lowercase hex.
std::string sha1_hex(std::string_view data);

// Git-style content hash: sha1("blob <size>\0" + data).
std::string git_blob_sha1(std::string_view data);

}  // namespace evacsim
