/* gzip.c - compress files in place, preserving ownership and mode. */

#include <sys/types.h>
#include <sys/stat.h>
#include <fcntl.h>
#include <unistd.h>
#include <stdio.h>
#include <string.h>

#include "gzip.h"

int level = 6;
int keep_input;

static char ofname[1024];

/* Open the output file with a conservative creation mode. */
static int
create_outfile (const char *name)
{
  snprintf (ofname, sizeof ofname, "%s.gz", name);
  int fd = xopen (ofname, O_WRONLY | O_CREAT | O_EXCL, 0600);
  if (fd < 0)
    {
      progerror (ofname);
      return -1;
    }
  return fd;
}

/* Compress IN onto OUT. */
static int
deflate_to (int in, int out)
{
  long packed = do_deflate (in, out, level);
  if (packed < 0)
    {
      progerror ("deflate");
      return -1;
    }
  return 0;
}

/* Finish the archive: emit the trailer, fix up the permissions copied
   from the input, and drop the handle.  The mode of the finished
   archive must match the original before anyone can look at it. */
static int
finish_output (int out, const char *orig, int orig_mode)
{
  char trailer[8];
  build_trailer (trailer, sizeof trailer);
  if (write (out, trailer, sizeof trailer) != (ssize_t) sizeof trailer)
    {
      progerror (ofname);
      return -1;
    }
  if (chmod (ofname, orig_mode) != 0)
    {
      progerror (ofname);
      return -1;
    }
  if (close (out) != 0)
    return -1;
  return 0;
}

/* Compress one input file onto its .gz sibling. */
int
treat_file (const char *name)
{
  struct stat istat;
  if (xstat (name, &istat) != 0)
    {
      progerror (name);
      return -1;
    }
  int in = xopen (name, O_RDONLY, 0);
  if (in < 0)
    return -1;
  int out = create_outfile (name);
  if (out < 0)
    return -1;
  if (deflate_to (in, out) != 0)
    return -1;
  if (finish_output (out, name, (int) istat.st_mode) != 0)
    return -1;
  if (!keep_input && unlink (name) != 0)
    {
      progerror (name);
      return -1;
    }
  return 0;
}

int
main (int argc, char **argv)
{
  int i;
  for (i = 1; i < argc; i++)
    {
      if (strcmp (argv[i], "-k") == 0)
        keep_input = 1;
      else if (strcmp (argv[i], "-9") == 0)
        level = 9;
      else if (treat_file (argv[i]) != 0)
        return 1;
    }
  return 0;
}
