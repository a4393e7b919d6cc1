"""
Created on 2026-10-03

@author: wf
"""
from dataclasses import dataclass

import histories


@dataclass
class Version(object):
    """
    Version handling for pyHistories
    """

    name = "pyHistories"
    version = histories.__version__
    description = "decoherent histories probability engine with branching tree and time average statistics"
    date = "2026-10-03"
    updated = "2026-10-17"

    authors = "Wolfgang Fahl"

    doc_url = "https://wiki.bitplan.com/index.php/pyHistories"
    chat_url = "https://github.com/WolfgangFahl/pyHistories/discussions"
    cm_url = "https://github.com/WolfgangFahl/pyHistories"

    license = f"""Copyright 2026 contributors. All rights reserved.

  Licensed under the Apache License 2.0
  http://www.apache.org/licenses/LICENSE-2.0

  Distributed on an "AS IS" basis without warranties
  or conditions of any kind, either express or implied."""

    longDescription = f"""{name} version {version}
{description}

  Created by {authors} on {date} last updated {updated}"""
