/* version.c - build identification. */

const char *version_tag = "mv (fixture coreutils) 9.0";

const char *
version_string (void)
{
  return version_tag;
}
