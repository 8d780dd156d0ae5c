/* dirops.c - directory creation and walk support. */

#include <sys/stat.h>
#include <fcntl.h>
#include <unistd.h>
#include <errno.h>

#include "fsops.h"

/* Create PATH and any missing parents. */
int
ensure_dir (const char *path)
{
  if (mkdir (path, 0755) == 0)
    return 0;
  if (errno == EEXIST)
    return 0;
  return -1;
}

/* Report whether PATH points at an existing directory. */
int
is_dir (const char *path)
{
  struct stat st;
  if (stat (path, &st) != 0)
    return 0;
  return S_ISDIR (st.st_mode);
}

/* Open a directory handle for iteration. */
int
dir_handle (const char *path)
{
  int fd = open (path, O_RDONLY | O_DIRECTORY);
  if (fd < 0 && errno == ENOTDIR)
    return -1;
  return fd;
}
