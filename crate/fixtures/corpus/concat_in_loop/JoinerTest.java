package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class JoinerTest {
    @Test
    public void joins() {
        assertEquals("abc", new Joiner().showBug(new String[] {"a", "b", "c"}));
    }
}
