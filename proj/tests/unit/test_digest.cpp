#include "doctest.h"
#include "test_support.hpp"
#include "wikicite/digest.hpp"
#include "wikicite/errors.hpp"

using namespace wikicite;

TEST_CASE("sha256 matches published test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("incremental hashing equals one-shot hashing") {
  std::string data(100000, 'x');
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<char>('a' + i % 26);
  Sha256 h;
  for (std::size_t i = 0; i < data.size(); i += 777) h.update(std::string_view(data).substr(i, 777));
  CHECK(h.finish() == sha256_hex(data));
}

TEST_CASE("file digest") {
  testing::TempDir dir;
  testing::write_text(dir / "f.txt", "abc");
  CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
  CHECK_THROWS_AS(sha256_file(dir / "missing"), InputError);
}
