package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class ParserTest {
    @Test
    public void reportsBadInput() {
        assertEquals(-2, new Parser().showBug("12x"));
        assertEquals(0, new Parser().showBug("oops"));
    }
}
