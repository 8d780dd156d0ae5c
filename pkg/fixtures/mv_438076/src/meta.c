/* meta.c - metadata flush helpers. */

#include <sys/stat.h>
#include <fcntl.h>
#include <unistd.h>

#include "fsops.h"

/* Push a file's metadata to stable storage. */
int
sync_metadata (const char *path)
{
  int fd = open (path, O_RDONLY);
  if (fd < 0)
    return -1;
  if (fsync (fd) != 0)
    {
      close (fd);
      return -1;
    }
  close (fd);
  return 0;
}

/* Compare two paths without following symlinks. */
int
same_inode (const char *a, const char *b)
{
  struct stat sa, sb;
  if (lstat (a, &sa) != 0)
    return 0;
  if (lstat (b, &sb) != 0)
    return 0;
  return sa.st_ino == sb.st_ino && sa.st_dev == sb.st_dev;
}
